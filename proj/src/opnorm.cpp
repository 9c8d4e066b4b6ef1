#include "qgp/opnorm.hpp"

#include <cmath>

#include "qgp/errors.hpp"

namespace qgp {

std::vector<CMatrix> AffineFamily::eval(const RVector& t) const {
    std::vector<CMatrix> out = m0;
    for (int i = 0; i < params(); ++i)
        if (t(i) != 0.0)
            for (size_t b = 0; b < out.size(); ++b) out[b] += t(i) * mi[static_cast<size_t>(i)][b];
    return out;
}

double AffineFamily::norm_at(const RVector& t) const {
    double m = 0.0;
    for (const CMatrix& b : eval(t)) m = std::max(m, spectral_norm(b));
    return m;
}

ParamSet ParamSet::from_polytope(const Polytope& p) {
    ParamSet s;
    s.a = p.a();
    s.b = p.b();
    return s;
}

RVector polytope_interior_point(const RMatrix& a, const RVector& b) {
    const int n = static_cast<int>(a.cols());
    if (a.rows() == 0) return RVector::Zero(n);
    // maximize r s.t. a_i x + r |a_i| <= b_i, r <= 1
    LinearProgram lp = make_lp(n + 1, true);
    lp.objective(n) = 1.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        RVector row(n + 1);
        row.head(n) = a.row(i).transpose();
        row(n) = a.row(i).norm();
        lp.add_row(row, Sense::LessEqual, b(i));
    }
    RVector cap = RVector::Zero(n + 1);
    cap(n) = 1.0;
    lp.add_row(cap, Sense::LessEqual, 1.0);
    const LpSolution s = solve_lp(lp);
    require(s.status == LpStatus::Optimal, ErrorKind::Domain, "feasible set is empty");
    require(s.x(n) > 1e-12, ErrorKind::Domain, "feasible set has empty interior");
    return s.x.head(n);
}

namespace {

// |z| for complex scalars z = e * r with one common phase e turns into |r|
bool aligned_scalar_block(const AffineFamily& f, size_t blk, Complex& phase) {
    Complex ref = f.m0[blk](0, 0);
    double best = std::abs(ref);
    for (int i = 0; i < f.params(); ++i) {
        const Complex z = f.mi[static_cast<size_t>(i)][blk](0, 0);
        if (std::abs(z) > best) {
            best = std::abs(z);
            ref = z;
        }
    }
    if (best == 0.0) {
        phase = 1.0;
        return true;
    }
    phase = ref / best;
    auto ok = [&](Complex z) { return std::abs((z * std::conj(phase)).imag()) <= 1e-14 * std::max(1.0, std::abs(z)); };
    if (!ok(f.m0[blk](0, 0))) return false;
    for (int i = 0; i < f.params(); ++i)
        if (!ok(f.mi[static_cast<size_t>(i)][blk](0, 0))) return false;
    return true;
}

RVector coordinate_box(const RMatrix& a, const RVector& b) {
    const int n = static_cast<int>(a.cols());
    RVector box(n);
    for (int i = 0; i < n; ++i) {
        double m = 0.0;
        for (double sgn : {1.0, -1.0}) {
            LinearProgram lp = make_lp(n, true);
            lp.objective(i) = sgn;
            lp.constraints = a;
            lp.rhs = b;
            lp.senses.assign(static_cast<size_t>(a.rows()), Sense::LessEqual);
            const LpSolution s = solve_lp(lp);
            if (s.status != LpStatus::Optimal) return RVector();
            m = std::max(m, std::abs(s.value));
        }
        box(i) = m;
    }
    return box;
}

RVector project_polytope(const RMatrix& a, const RVector& b, const RVector& y) {
    const Eigen::Index m = a.rows();
    if (m == 0) return y;
    RVector x = y;
    std::vector<RVector> inc(static_cast<size_t>(m), RVector::Zero(y.size()));
    for (int cycle = 0; cycle < 500; ++cycle) {
        double change = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const RVector z = x + inc[static_cast<size_t>(i)];
            const RVector ai = a.row(i).transpose();
            const double viol = ai.dot(z) - b(i);
            RVector xn = z;
            if (viol > 0.0) xn -= viol / ai.squaredNorm() * ai;
            inc[static_cast<size_t>(i)] = z - xn;
            change = std::max(change, (xn - x).lpNorm<Eigen::Infinity>());
            x = std::move(xn);
        }
        if (change < 1e-13) break;
    }
    return x;
}

OpnormResult subgradient(const AffineFamily& f, const ParamSet& feas, const OpnormOptions& opt) {
    require(feas.lmis.empty(), ErrorKind::Unsupported, "subgradient path supports polytope feasible sets only");
    const int n = f.params();
    RVector t = feas.a.rows() ? polytope_interior_point(feas.a, feas.b) : RVector(RVector::Zero(n));
    RVector best_t = t;
    double best = f.norm_at(t);
    const double step0 = std::max(1.0, best);
    std::vector<CMatrix> ybar;
    for (const auto& m : f.m0) ybar.push_back(CMatrix::Zero(m.rows(), m.cols()));
    double wsum = 0.0;
    int k = 1;
    for (; k <= opt.max_iterations; ++k) {
        const std::vector<CMatrix> blocks = f.eval(t);
        size_t arg = 0;
        double top = -1.0;
        SingularPair sp;
        for (size_t b = 0; b < blocks.size(); ++b) {
            SingularPair cand = top_singular_pair(blocks[b]);
            if (cand.sigma > top) {
                top = cand.sigma;
                sp = cand;
                arg = b;
            }
        }
        if (top < best) {
            best = top;
            best_t = t;
        }
        RVector g(n);
        for (int i = 0; i < n; ++i)
            g(i) = (sp.u.adjoint() * f.mi[static_cast<size_t>(i)][arg] * sp.v)(0, 0).real();
        const double w = 1.0 / std::sqrt(static_cast<double>(k));
        ybar[arg] += w * (sp.u * sp.v.adjoint());
        wsum += w;
        const double gn = g.norm();
        if (gn < 1e-15) break;
        t = project_polytope(feas.a, feas.b, t - step0 * w * g / gn);
    }
    // lower bound: Re tr(Y* M(t)) <= ||M(t)|| whenever ||Y||_1 <= 1
    for (auto& y : ybar) y /= wsum;
    double c0 = 0.0;
    for (size_t b = 0; b < ybar.size(); ++b) c0 += (ybar[b].adjoint() * f.m0[b]).trace().real();
    LinearProgram lp = make_lp(n, false);
    for (int i = 0; i < n; ++i) {
        double ci = 0.0;
        for (size_t b = 0; b < ybar.size(); ++b) ci += (ybar[b].adjoint() * f.mi[static_cast<size_t>(i)][b]).trace().real();
        lp.objective(i) = ci;
    }
    lp.constraints = feas.a;
    lp.rhs = feas.b;
    lp.senses.assign(static_cast<size_t>(feas.a.rows()), Sense::LessEqual);
    double lower = 0.0;
    const LpSolution s = solve_lp(lp);
    if (s.status == LpStatus::Optimal) lower = std::max(0.0, c0 + s.value);
    OpnormResult r;
    r.argmin = best_t;
    r.value.value = best;
    r.value.lower = std::min(lower, best);
    r.value.upper = best;
    r.value.method = Method::Iterative;
    r.value.iterations = std::min(k, opt.max_iterations);
    r.value.note = "subgradient";
    return r;
}

}  // namespace

OpnormResult min_opnorm(const AffineFamily& f, const ParamSet& feas, const OpnormOptions& opt) {
    const int n = f.params();
    for (const auto& row : f.mi)
        require(row.size() == f.m0.size(), ErrorKind::Structural, "affine family: block count mismatch");
    require(feas.a.cols() == n || feas.a.rows() == 0, ErrorKind::Structural, "feasible set dimension mismatch");
    if (opt.method == OpnormMethod::Subgradient) return subgradient(f, feas, opt);

    const int s_idx = n;
    ConicProgram cp(n + 1);
    cp.objective(s_idx) = -1.0;
    for (Eigen::Index i = 0; i < feas.a.rows(); ++i) {
        RVector row = RVector::Zero(n + 1);
        row.head(n) = feas.a.row(i).transpose();
        cp.add_row(row, feas.b(i));
    }
    for (const Lmi& l : feas.lmis) {
        Lmi e = l;
        e.coeffs.push_back(CMatrix());
        cp.lmis.push_back(std::move(e));
    }
    for (size_t blk = 0; blk < f.m0.size(); ++blk) {
        const CMatrix& m0 = f.m0[blk];
        Complex phase;
        if (m0.rows() == 1 && m0.cols() == 1 && aligned_scalar_block(f, blk, phase)) {
            RVector row = RVector::Zero(n + 1);
            for (int i = 0; i < n; ++i) row(i) = (f.mi[static_cast<size_t>(i)][blk](0, 0) * std::conj(phase)).real();
            const double c0 = (m0(0, 0) * std::conj(phase)).real();
            // |row.t + c0| <= s
            RVector up = row;
            up(s_idx) = -1.0;
            cp.add_row(up, -c0);
            RVector dn = -row;
            dn(s_idx) = -1.0;
            cp.add_row(dn, c0);
            continue;
        }
        const Eigen::Index r = m0.rows(), c = m0.cols();
        Lmi l;
        l.constant = CMatrix::Zero(r + c, r + c);
        l.constant.topRightCorner(r, c) = m0;
        l.constant.bottomLeftCorner(c, r) = m0.adjoint();
        for (int i = 0; i < n; ++i) {
            const CMatrix& mi = f.mi[static_cast<size_t>(i)][blk];
            if (mi.isZero(0.0)) {
                l.coeffs.push_back(CMatrix());
                continue;
            }
            CMatrix d = CMatrix::Zero(r + c, r + c);
            d.topRightCorner(r, c) = mi;
            d.bottomLeftCorner(c, r) = mi.adjoint();
            l.coeffs.push_back(std::move(d));
        }
        l.coeffs.push_back(CMatrix::Identity(r + c, r + c));
        cp.lmis.push_back(std::move(l));
    }

    OpnormResult out;
    if (cp.lmis.empty()) {
        const ConicSolution s = solve_conic(cp);
        require(s.status == ConicStatus::Optimal, ErrorKind::Solver,
                std::string("opnorm LP did not solve: ") + conic_status_name(s.status));
        out.argmin = s.x.head(n);
        const double sval = -s.value;
        const double v = f.norm_at(out.argmin);
        out.value.value = v;
        out.value.lower = std::min(sval, v);
        out.value.upper = std::max(sval, v);
        out.value.method = Method::ExactLp;
        out.value.iterations = s.iterations;
        return out;
    }

    RVector t0 = feas.interior;
    if (t0.size() != n) {
        require(feas.lmis.empty(), ErrorKind::Structural, "spectral feasible sets need an interior point");
        t0 = polytope_interior_point(feas.a, feas.b);
    }
    const double s0 = f.norm_at(t0) + 1.0;
    RVector cap = RVector::Zero(n + 1);
    cap(s_idx) = 1.0;
    cp.add_row(cap, s0 + 1.0);
    cp.start = RVector(n + 1);
    cp.start.head(n) = t0;
    cp.start(s_idx) = s0;
    RVector tbox = feas.box;
    if (tbox.size() != n && feas.lmis.empty()) tbox = coordinate_box(feas.a, feas.b);
    if (tbox.size() == n) {
        cp.box = RVector(n + 1);
        cp.box.head(n) = tbox;
        cp.box(s_idx) = s0 + 1.0;
    }
    ConicOptions co;
    co.gap_tol = opt.gap_tol;
    const ConicSolution s = solve_conic(cp, co);
    require(s.status == ConicStatus::Optimal || s.status == ConicStatus::IterationLimit, ErrorKind::Solver,
            std::string("opnorm barrier failed: ") + conic_status_name(s.status));
    out.argmin = s.x.head(n);
    const double v = f.norm_at(out.argmin);
    out.value.value = v;
    out.value.upper = v;
    out.value.lower = std::min(v, std::max(0.0, -s.upper));
    out.value.method = Method::Iterative;
    out.value.iterations = s.iterations;
    if (!s.certified) out.value.note = "uncertified-lower";
    return out;
}

OpnormResult min_opnorm_affine(const AffineFamily& f, const Polytope& feasible, const OpnormOptions& opt) {
    return min_opnorm(f, ParamSet::from_polytope(feasible), opt);
}

}  // namespace qgp
