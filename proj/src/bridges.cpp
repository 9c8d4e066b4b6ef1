#include "qgp/bridges.hpp"

#include <cmath>

#include "qgp/conic.hpp"
#include "qgp/parallel.hpp"

namespace qgp {

namespace {

// min_b ||pi_A(a) w - w pi_B(b)|| over {L_B <= r}; the b-dependent pencil is built once
class TargetSolver {
public:
    TargetSolver(const Bridge& g, const LipNorm& lb) : g_(g), lb_(lb) {
        require(lb.parent() == g.b(), ErrorKind::Structural, "target: Lip-norm does not live on the bridge codomain");
        require(lb.kernel_pass(), ErrorKind::Domain, "target: L_B kernel is larger than the constants");
        const int nb = lb.parent().linear_dim();
        for (int j = 0; j < nb; ++j)
            coeffs_.push_back((-1.0 * (g.pivot() * g.pi_b().apply(sa_basis(lb.parent(), j)))).blocks());
        unit_coeff_ = (-1.0 * g.pivot()).blocks();
        ball_ = ball_param_set(lb.ball(), RMatrix::Identity(nb, nb), 1.0);
        rb_ = centered_radius_bound(lb);
    }

    TargetResult solve(const Element& a, double r, const MetricOptions& opt) const {
        require(a.parent() == g_.a(), ErrorKind::Structural, "target: element does not belong to A");
        require(r >= 0.0 && std::isfinite(r), ErrorKind::Domain, "target: radius must be finite and non-negative");
        const Algebra& bl = lb_.parent();
        const Element ap = r > 0.0 ? Element((1.0 / r) * a) : a;
        AffineFamily f;
        f.m0 = (g_.pi_a().apply(ap) * g_.pivot()).blocks();
        double s = 0.0;
        for (const auto& m : f.m0) s = std::max(s, spectral_norm(m));
        // a unit vector v of the 1-level gives |v* pi_A(a) v - v* pi_B(b) v| <= ||N||, which pins the
        // constant part of b; the slack 2 matches the cap min_opnorm places on s
        const double cap = s + 2.0 + op_norm(ap);
        TargetResult out;
        if (r > 0.0) {
            f.mi = coeffs_;
            ParamSet ps = ball_;
            ps.box = RVector::Constant(bl.linear_dim(), std::sqrt(static_cast<double>(bl.rep_dim())) * (cap + 2.0 * rb_));
            OpnormOptions oo;
            oo.gap_tol = opt.gap_tol;
            const OpnormResult res = min_opnorm(f, ps, oo);
            out.b = r * from_sa_coords(bl, res.argmin);
            out.value = res.value;
            out.value.value *= r;
            out.value.lower *= r;
            out.value.upper *= r;
        } else {
            f.mi = {unit_coeff_};
            ParamSet ps;
            ps.a = RMatrix(0, 1);
            ps.b = RVector(0);
            ps.interior = RVector::Zero(1);
            ps.box = RVector::Constant(1, cap);
            OpnormOptions oo;
            oo.gap_tol = opt.gap_tol;
            const OpnormResult res = min_opnorm(f, ps, oo);
            out.b = Element::scalar(bl, res.argmin(0));
            out.value = res.value;
        }
        out.value.normalize();
        return out;
    }

private:
    const Bridge& g_;
    const LipNorm& lb_;
    std::vector<std::vector<CMatrix>> coeffs_;
    std::vector<CMatrix> unit_coeff_;
    ParamSet ball_;
    double rb_ = 0.0;
};

struct TopPair {
    int block = 0;
    SingularPair pair;
};

TopPair top_pair(const Element& x) {
    TopPair t;
    t.pair.sigma = -1.0;
    for (int i = 0; i < x.parent().block_count(); ++i) {
        SingularPair p = top_singular_pair(x.block(i));
        if (p.sigma > t.pair.sigma) {
            t.pair = std::move(p);
            t.block = i;
        }
    }
    return t;
}

Method combine_inner(const std::vector<CertifiedValue>& v, Method exact_tag) {
    for (const auto& c : v)
        if (c.method == Method::Iterative) return Method::Iterative;
    return exact_tag;
}

}  // namespace

TargetResult best_target(const Bridge& g, const LipNorm& lb, const Element& a, double r, const MetricOptions& opt) {
    return TargetSolver(g, lb).solve(a, r, opt);
}

CertifiedValue directed_reach(const Bridge& g, const LipNorm& la, const LipNorm& lb, const MetricOptions& opt) {
    require(la.parent() == g.a(), ErrorKind::Structural, "reach: L_A does not live on the bridge domain");
    require(la.kernel_pass(), ErrorKind::Domain, "reach: L_A kernel is larger than the constants");
    const TargetSolver solver(g, lb);
    const Algebra& alg = la.parent();
    if (alg.linear_dim() == 1) return CertifiedValue::exact(0.0);
    // b = c 1 with ||a - c|| <= R_A is always admissible
    const double fallback = op_norm(g.pivot()) * centered_radius_bound(la);

    if (la.polytopal() && alg.linear_dim() - 1 <= opt.vertex_limit) {
        // a -> inf_b bn(a, b) is convex, so its sup over the slice sits at a vertex
        const VertexSet vs = lip_ball_slice(la, State::tracial(alg), opt.vertex_limit);
        std::vector<CertifiedValue> vals(vs.elements.size());
        parallel_for(static_cast<int>(vals.size()), opt.threads,
                     [&](int k) { vals[static_cast<size_t>(k)] = solver.solve(vs.elements[static_cast<size_t>(k)], 1.0, opt).value; });
        CertifiedValue out = CertifiedValue::exact(0.0);
        for (const auto& v : vals) out = cv_max(out, v);
        out.method = combine_inner(vals, Method::VertexEnum);
        out.upper = std::min(out.upper, std::max(fallback, out.lower));
        out.normalize();
        return out;
    }

    // seeded multi-start ascent; every visited a is feasible, so the best inner lower bound is certified
    const Slice slice = lip_ball_slice_set(la, State::tracial(alg));
    const RMatrix& q = slice.basis;
    std::vector<std::vector<CMatrix>> pa;
    for (Eigen::Index j = 0; j < q.cols(); ++j)
        pa.push_back((g.pi_a().apply(from_sa_coords(alg, q.col(j))) * g.pivot()).blocks());
    const int starts = std::max(1, opt.ascent_starts);
    std::vector<double> best(static_cast<size_t>(starts), 0.0);
    std::vector<int> iters(static_cast<size_t>(starts), 0);
    parallel_for(starts, opt.threads, [&](int s) {
        Rng rng(opt.seed + 0xA24BAED4963EE407ULL * static_cast<std::uint64_t>(s + 1));
        std::normal_distribution<double> gauss;
        RVector c(q.cols());
        for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = gauss(rng);
        RVector y = maximize_on_slice(la, slice, c, opt).y;
        double cur = -1.0;
        for (int step = 0; step < opt.ascent_steps; ++step) {
            Element a = from_sa_coords(alg, q * y);
            const double l = eval_lipnorm(la, a);
            if (l > 1.0) a = (1.0 / l) * a;
            const TargetResult t = solver.solve(a, 1.0, opt);
            iters[static_cast<size_t>(s)] += t.value.iterations;
            best[static_cast<size_t>(s)] = std::max(best[static_cast<size_t>(s)], t.value.lower);
            if (t.value.lower <= cur + 1e-10) break;
            cur = t.value.lower;
            // linearize the inner value at the minimizer through the top singular pair
            const TopPair tp = top_pair(g.pi_a().apply(a) * g.pivot() - g.pivot() * g.pi_b().apply(t.b));
            RVector grad(q.cols());
            for (Eigen::Index j = 0; j < grad.size(); ++j)
                grad(j) = (tp.pair.u.adjoint() * pa[static_cast<size_t>(j)][static_cast<size_t>(tp.block)] * tp.pair.v)(0, 0).real();
            if (grad.norm() < 1e-14) break;
            y = maximize_on_slice(la, slice, grad, opt).y;
        }
    });
    CertifiedValue out;
    out.method = Method::Iterative;
    for (size_t s = 0; s < best.size(); ++s) {
        out.lower = std::max(out.lower, best[s]);
        out.iterations += iters[s];
    }
    out.value = out.lower;
    out.upper = std::max(out.lower, fallback);
    out.note = "lower-bound-only: multi-start ascent";
    return out;
}

CertifiedValue reach(const Bridge& g, const LipNorm& la, const LipNorm& lb, const MetricOptions& opt) {
    // bn for the inverse bridge is the adjoint expression, so the B-side term is a directed reach of g^-1
    return cv_max(directed_reach(g, la, lb, opt), directed_reach(inverse_bridge(g), lb, la, opt));
}

CertifiedValue directed_height(const Morphism& pi, const OneLevelSpace& level, const LipNorm& l, const MetricOptions& opt) {
    require(pi.source() == l.parent(), ErrorKind::Structural, "height: Lip-norm does not live on the leg source");
    require(static_cast<int>(level.basis.size()) == pi.target().block_count(), ErrorKind::Structural,
            "height: 1-level does not match D");
    require(!level.empty(), ErrorKind::Structural, "height: empty 1-level");
    require(l.kernel_pass(), ErrorKind::Domain, "height: Lip-norm kernel is larger than the constants");
    const Algebra& alg = l.parent();
    const Algebra& d = pi.target();
    if (alg.linear_dim() == 1) return CertifiedValue::exact(0.0);

    // every source block sits inside a D-block fixed by the pivot: pulled-back 1-level states are all states
    bool covered = true;
    for (int s = 0; s < alg.block_count() && covered; ++s) {
        bool found = false;
        for (int t = 0; t < d.block_count() && !found; ++t)
            found = pi.multiplicity(t, s) >= 1 && level.basis[static_cast<size_t>(t)].cols() == d.dim(t);
        covered = found;
    }
    if (covered) {
        CertifiedValue z = CertifiedValue::exact(0.0);
        z.note = "1-level covers every block";
        return z;
    }

    // inf over pulled-back 1-level states of mk(phi, .) = sup_a phi(a) - lambda_max(V* pi(a) V) (minimax)
    const Slice slice = lip_ball_slice_set(l, State::tracial(alg));
    const RMatrix& q = slice.basis;
    const int ny = static_cast<int>(q.cols());
    const double diam_up = diameter_upper_bound(l);
    const double cap = diam_up + 1.0;
    std::vector<Element> comp_basis;
    for (int j = 0; j < ny; ++j) comp_basis.push_back(pi.apply(from_sa_coords(alg, q.col(j))));

    ConicProgram tmpl(ny + 1);
    for (Eigen::Index i = 0; i < slice.set.a.rows(); ++i) {
        RVector row = RVector::Zero(ny + 1);
        row.head(ny) = slice.set.a.row(i).transpose();
        tmpl.add_row(row, slice.set.b(i));
    }
    for (const Lmi& li : slice.set.lmis) {
        Lmi e = li;
        e.coeffs.emplace_back();
        tmpl.lmis.push_back(std::move(e));
    }
    RVector cap_row = RVector::Zero(ny + 1);
    cap_row(ny) = 1.0;
    tmpl.add_row(cap_row, cap);
    tmpl.add_row(-cap_row, cap);
    for (int t = 0; t < d.block_count(); ++t) {
        const CMatrix& v = level.basis[static_cast<size_t>(t)];
        const Eigen::Index k = v.cols();
        if (k == 0) continue;
        std::vector<CMatrix> cj;
        for (int j = 0; j < ny; ++j) {
            CMatrix c = v.adjoint() * comp_basis[static_cast<size_t>(j)].block(t) * v;
            cj.push_back(0.5 * (c + c.adjoint()));
        }
        if (k == 1) {
            RVector row = RVector::Zero(ny + 1);
            for (int j = 0; j < ny; ++j) row(j) = cj[static_cast<size_t>(j)](0, 0).real();
            row(ny) = -1.0;
            tmpl.add_row(row, 0.0);
            continue;
        }
        Lmi li;
        li.constant = CMatrix::Zero(k, k);
        for (int j = 0; j < ny; ++j)
            li.coeffs.push_back(max_abs_entry(cj[static_cast<size_t>(j)]) > 0.0 ? CMatrix(-cj[static_cast<size_t>(j)]) : CMatrix());
        li.coeffs.push_back(CMatrix::Identity(k, k));
        tmpl.lmis.push_back(std::move(li));
    }
    tmpl.start = RVector::Zero(ny + 1);
    tmpl.start(ny) = 1.0;
    if (std::isfinite(diam_up)) {
        tmpl.box = RVector::Constant(ny + 1, std::sqrt(static_cast<double>(alg.rep_dim())) * diam_up);
        tmpl.box(ny) = cap;
    }

    auto lambda_comp = [&](const Element& a) {
        const Element pa = pi.apply(a);
        double m = -kInf;
        for (int t = 0; t < d.block_count(); ++t) {
            const CMatrix& v = level.basis[static_cast<size_t>(t)];
            if (v.cols() == 0) continue;
            const HermitianEigen e = hermitian_eigen(v.adjoint() * pa.block(t) * v);
            m = std::max(m, e.values(e.values.size() - 1));
        }
        return m;
    };
    struct PhiResult {
        CertifiedValue value;
        Element witness;
    };
    auto solve_for = [&](const State& phi) {
        ConicProgram p = tmpl;
        p.objective.head(ny) = q.transpose() * state_functional(phi);
        p.objective(ny) = -1.0;
        ConicOptions co;
        co.gap_tol = opt.gap_tol;
        const ConicSolution sol = solve_conic(p, co);
        require(sol.status == ConicStatus::Optimal || sol.status == ConicStatus::IterationLimit, ErrorKind::Solver,
                std::string("height: inner program failed: ") + conic_status_name(sol.status));
        Element a = from_sa_coords(alg, q * sol.x.head(ny));
        if (!sol.exact) {
            const double la = eval_lipnorm(l, a);
            if (la > 1.0) a = (1.0 / la) * a;
        }
        const double lower = std::max(0.0, phi(a).real() - lambda_comp(a));
        PhiResult r;
        r.value = CertifiedValue{lower, lower, std::max(lower, sol.upper), sol.exact ? Method::ExactLp : Method::Iterative,
                                 sol.iterations, sol.certified ? std::string() : std::string("uncertified-upper")};
        if (sol.exact) r.value.value = std::max(0.0, sol.value);
        r.value.normalize();
        r.witness = std::move(a);
        return r;
    };

    if (alg.is_commutative()) {
        // pure states are the Diracs, and phi -> inf_psi mk(phi, psi) is convex
        std::vector<CertifiedValue> vals(static_cast<size_t>(alg.block_count()));
        parallel_for(alg.block_count(), opt.threads,
                     [&](int i) { vals[static_cast<size_t>(i)] = solve_for(State::dirac(alg, i)).value; });
        CertifiedValue out = CertifiedValue::exact(0.0);
        for (const auto& v : vals) out = cv_max(out, v);
        out.method = combine_inner(vals, Method::ExactLp);
        return out;
    }

    // sampled pure states, then ascent from the best ones via the top eigenvector of the witness
    Rng rng(opt.seed);
    const int samples = std::max(1, opt.pure_samples);
    std::vector<State> phis;
    for (int k = 0; k < samples; ++k) phis.push_back(random_pure_state(alg, rng));
    std::vector<PhiResult> res(phis.size());
    parallel_for(samples, opt.threads, [&](int k) { res[static_cast<size_t>(k)] = solve_for(phis[static_cast<size_t>(k)]); });
    std::vector<int> order(static_cast<size_t>(samples));
    for (int k = 0; k < samples; ++k) order[static_cast<size_t>(k)] = k;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return res[static_cast<size_t>(x)].value.lower > res[static_cast<size_t>(y)].value.lower;
    });
    const int starts = std::min(samples, std::max(1, opt.ascent_starts));
    std::vector<double> best(static_cast<size_t>(starts), 0.0);
    parallel_for(starts, opt.threads, [&](int s) {
        PhiResult cur = res[static_cast<size_t>(order[static_cast<size_t>(s)])];
        for (int step = 0; step < opt.ascent_steps; ++step) {
            double hi = -kInf;
            int blk = 0;
            CVector vec;
            for (int i = 0; i < alg.block_count(); ++i) {
                const HermitianEigen e = hermitian_eigen(cur.witness.block(i));
                const Eigen::Index last = e.values.size() - 1;
                if (e.values(last) > hi) {
                    hi = e.values(last);
                    blk = i;
                    vec = e.vectors.col(last);
                }
            }
            PhiResult next = solve_for(State::vector_state(alg, blk, vec));
            if (next.value.lower <= cur.value.lower + 1e-10) break;
            cur = std::move(next);
        }
        best[static_cast<size_t>(s)] = cur.value.lower;
    });
    CertifiedValue out;
    out.method = Method::Iterative;
    for (const auto& r : res) {
        out.lower = std::max(out.lower, r.value.lower);
        out.iterations += r.value.iterations;
    }
    for (double b : best) out.lower = std::max(out.lower, b);
    out.value = out.lower;
    out.upper = std::max(out.lower, diam_up);
    out.note = "lower-bound-only: sampled pure states";
    return out;
}

CertifiedValue height(const Bridge& g, const LipNorm& la, const LipNorm& lb, const MetricOptions& opt) {
    return cv_max(directed_height(g.pi_a(), g.one_level(), la, opt), directed_height(g.pi_b(), g.one_level(), lb, opt));
}

BridgeLength bridge_evaluate(const Bridge& g, const LipNorm& la, const LipNorm& lb, const MetricOptions& opt) {
    BridgeLength out;
    out.reach = reach(g, la, lb, opt);
    out.height = height(g, la, lb, opt);
    out.length = cv_max(out.reach, out.height);
    return out;
}

CertifiedValue bridge_length(const Bridge& g, const LipNorm& la, const LipNorm& lb, const MetricOptions& opt) {
    return bridge_evaluate(g, la, lb, opt).length;
}

}  // namespace qgp
