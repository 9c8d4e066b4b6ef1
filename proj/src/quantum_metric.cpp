#include "qgp/quantum_metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "qgp/bridge.hpp"
#include "qgp/conic.hpp"
#include "qgp/lp.hpp"
#include "qgp/parallel.hpp"

namespace qgp {

// ---------------------------------------------------------------- metric spaces

FiniteMetricSpace::FiniteMetricSpace(RMatrix dist, bool allow_zero) : dist_(std::move(dist)) {
    const Eigen::Index n = dist_.rows();
    require(n >= 1 && dist_.cols() == n, ErrorKind::Structural, "metric space: distance matrix must be square and non-empty");
    require(dist_.allFinite(), ErrorKind::Domain, "metric space: non-finite distance");
    const double scale = std::max(1.0, dist_.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
        require(dist_(i, i) == 0.0, ErrorKind::Domain, "metric space: diagonal must be zero");
        for (Eigen::Index j = 0; j < n; ++j) {
            require(dist_(i, j) == dist_(j, i), ErrorKind::Domain, "metric space: matrix must be symmetric");
            if (i != j) {
                if (allow_zero)
                    require(dist_(i, j) >= 0.0, ErrorKind::Domain, "metric space: negative distance");
                else
                    require(dist_(i, j) > 0.0, ErrorKind::Domain, "metric space: distinct points at distance zero");
            }
        }
    }
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (dist_(i, j) > dist_(i, k) + dist_(k, j) + 1e-12 * scale) {
                    std::ostringstream os;
                    os << "metric space: triangle inequality fails at (" << i << "," << k << "," << j << ")";
                    fail(ErrorKind::Domain, os.str());
                }
}

FiniteMetricSpace random_metric_space(int n, Rng& rng, double lo, double hi) {
    require(n >= 1, ErrorKind::Domain, "random metric space: need at least one point");
    std::uniform_real_distribution<double> u(lo, hi);
    RMatrix d = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = u(rng);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    return FiniteMetricSpace(d);
}

// ---------------------------------------------------------------- actions

Element act(const ActionElement& g, const Element& x) {
    const Algebra& a = x.parent();
    require(static_cast<int>(g.perm.size()) == a.block_count() && static_cast<int>(g.unitaries.size()) == a.block_count(),
            ErrorKind::Structural, "action element: block count mismatch");
    std::vector<CMatrix> out;
    for (int i = 0; i < a.block_count(); ++i) {
        const CMatrix& u = g.unitaries[static_cast<size_t>(i)];
        out.push_back(u * x.block(g.perm[static_cast<size_t>(i)]) * u.adjoint());
    }
    return Element(a, std::move(out));
}

// ---------------------------------------------------------------- ball representation

int NormConstraint::rows() const {
    for (const auto& c : coeffs)
        if (c.size()) return static_cast<int>(c.rows());
    return 0;
}

int NormConstraint::cols() const {
    for (const auto& c : coeffs)
        if (c.size()) return static_cast<int>(c.cols());
    return 0;
}

CMatrix NormConstraint::eval(const RVector& x) const {
    CMatrix m = CMatrix::Zero(rows(), cols());
    for (size_t j = 0; j < coeffs.size(); ++j)
        if (coeffs[j].size() && x(static_cast<Eigen::Index>(j)) != 0.0) m += x(static_cast<Eigen::Index>(j)) * coeffs[j];
    return m;
}

namespace {

// a 1x1 constraint whose coefficients share one phase is |g . x| <= scale r
bool scalar_row(const NormConstraint& c, RVector& row) {
    if (c.rows() != 1 || c.cols() != 1) return false;
    Complex ref = 0.0;
    double best = 0.0;
    for (const auto& m : c.coeffs)
        if (m.size() && std::abs(m(0, 0)) > best) {
            best = std::abs(m(0, 0));
            ref = m(0, 0);
        }
    row = RVector::Zero(static_cast<Eigen::Index>(c.coeffs.size()));
    if (best == 0.0) return true;
    const Complex phase = ref / best;
    for (size_t j = 0; j < c.coeffs.size(); ++j) {
        if (!c.coeffs[j].size()) continue;
        const Complex z = c.coeffs[j](0, 0) * std::conj(phase);
        if (std::abs(z.imag()) > 1e-14 * std::max(1.0, std::abs(z))) return false;
        row(static_cast<Eigen::Index>(j)) = z.real();
    }
    return true;
}

bool all_hermitian(const std::vector<CMatrix>& ms) {
    for (const auto& m : ms)
        if (m.size() && (m.rows() != m.cols() || !is_hermitian(m, 1e-13))) return false;
    return true;
}

Element basis_element(const Algebra& a, int k) { return sa_basis(a, k); }

}  // namespace

ParamSet ball_param_set(const BallRep& ball, const RMatrix& p, double r) {
    require(p.rows() == ball.dim, ErrorKind::Structural, "ball constraints: coordinate map has wrong height");
    const Eigen::Index nz = p.cols();
    ParamSet s;
    std::vector<RVector> rows;
    std::vector<double> rhs;
    for (const NormConstraint& c : ball.cons) {
        const double bound = c.scale * r;
        RVector g;
        if (scalar_row(c, g)) {
            const RVector gz = p.transpose() * g;
            if (gz.cwiseAbs().maxCoeff() == 0.0) continue;
            rows.push_back(gz);
            rhs.push_back(bound);
            rows.push_back(-gz);
            rhs.push_back(bound);
            continue;
        }
        const int rr = c.rows(), cc = c.cols();
        std::vector<CMatrix> mz(static_cast<size_t>(nz));
        bool any = false;
        for (Eigen::Index k = 0; k < nz; ++k) {
            CMatrix m = CMatrix::Zero(rr, cc);
            bool nonzero = false;
            for (size_t j = 0; j < c.coeffs.size(); ++j) {
                const double w = p(static_cast<Eigen::Index>(j), k);
                if (w != 0.0 && c.coeffs[j].size()) {
                    m += w * c.coeffs[j];
                    nonzero = true;
                }
            }
            if (nonzero && max_abs_entry(m) > 0.0) {
                mz[static_cast<size_t>(k)] = std::move(m);
                any = true;
            }
        }
        if (!any) continue;
        if (rr == cc && all_hermitian(c.coeffs)) {
            for (double sgn : {1.0, -1.0}) {
                Lmi l;
                l.constant = bound * CMatrix::Identity(rr, rr);
                for (auto& m : mz) l.coeffs.push_back(m.size() ? CMatrix(sgn * m) : CMatrix());
                s.lmis.push_back(std::move(l));
            }
        } else {
            Lmi l;
            l.constant = bound * CMatrix::Identity(rr + cc, rr + cc);
            for (auto& m : mz) {
                if (!m.size()) {
                    l.coeffs.emplace_back();
                    continue;
                }
                CMatrix d = CMatrix::Zero(rr + cc, rr + cc);
                d.topRightCorner(rr, cc) = m;
                d.bottomLeftCorner(cc, rr) = m.adjoint();
                l.coeffs.push_back(std::move(d));
            }
            s.lmis.push_back(std::move(l));
        }
    }
    s.a = RMatrix(static_cast<Eigen::Index>(rows.size()), nz);
    s.b = RVector(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        s.a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
        s.b(static_cast<Eigen::Index>(i)) = rhs[i];
    }
    s.interior = RVector::Zero(nz);
    return s;
}

// ---------------------------------------------------------------- Lip-norm construction

const char* lip_kind_name(LipKind k) {
    switch (k) {
        case LipKind::FiniteLipschitz: return "finite_lipschitz";
        case LipKind::ErgodicAction: return "ergodic_action";
        case LipKind::DirectSumMax: return "direct_sum_max";
        case LipKind::PolytopeCustom: return "polytope_custom";
    }
    return "?";
}

LipNorm LipNorm::finite_lipschitz(FiniteMetricSpace space) {
    LipNorm l;
    l.kind_ = LipKind::FiniteLipschitz;
    l.parent_ = Algebra::commutative(space.size());
    const int n = space.size();
    l.ball_.dim = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            NormConstraint c;
            c.coeffs.resize(static_cast<size_t>(n));
            c.coeffs[static_cast<size_t>(i)] = CMatrix::Constant(1, 1, 1.0);
            c.coeffs[static_cast<size_t>(j)] = CMatrix::Constant(1, 1, -1.0);
            c.scale = space(i, j);
            l.ball_.cons.push_back(std::move(c));
        }
    l.space_ = std::move(space);
    l.finish();
    return l;
}

LipNorm LipNorm::ergodic_action(Algebra a, std::vector<ActionElement> elements) {
    LipNorm l;
    l.kind_ = LipKind::ErgodicAction;
    l.parent_ = std::move(a);
    const Algebra& alg = l.parent_;
    for (const auto& g : elements) {
        require(g.length > 0.0 && std::isfinite(g.length), ErrorKind::Domain, "ergodic action: lengths must be positive");
        require(static_cast<int>(g.perm.size()) == alg.block_count() &&
                    static_cast<int>(g.unitaries.size()) == alg.block_count(),
                ErrorKind::Structural, "ergodic action: element shape mismatch");
        std::vector<int> seen(static_cast<size_t>(alg.block_count()), 0);
        for (int i = 0; i < alg.block_count(); ++i) {
            const int p = g.perm[static_cast<size_t>(i)];
            require(p >= 0 && p < alg.block_count() && alg.dim(p) == alg.dim(i), ErrorKind::Structural,
                    "ergodic action: permutation must match block dimensions");
            require(!seen[static_cast<size_t>(p)]++, ErrorKind::Structural, "ergodic action: perm is not a permutation");
            require(is_unitary(g.unitaries[static_cast<size_t>(i)]), ErrorKind::Domain, "ergodic action: non-unitary");
        }
    }
    const int n = alg.linear_dim();
    l.ball_.dim = n;
    std::vector<RMatrix> maps;
    for (const auto& g : elements) {
        maps.push_back(sa_linear_map(alg, alg, [&](const Element& x) { return act(g, x); }));
        std::vector<Element> diffs;
        for (int k = 0; k < n; ++k) {
            const Element e = basis_element(alg, k);
            diffs.push_back(act(g, e) - e);
        }
        for (int i = 0; i < alg.block_count(); ++i) {
            NormConstraint c;
            c.scale = g.length;
            bool any = false;
            for (int k = 0; k < n; ++k) {
                const CMatrix& m = diffs[static_cast<size_t>(k)].block(i);
                if (max_abs_entry(m) > 1e-15) {
                    c.coeffs.push_back(m);
                    any = true;
                } else {
                    c.coeffs.emplace_back();
                }
            }
            if (any) l.ball_.cons.push_back(std::move(c));
        }
    }
    // closed with the identity adjoined: the listed maps are distinct, non-trivial and compose inside the list
    bool closed = !maps.empty();
    const RMatrix id = RMatrix::Identity(n, n);
    auto close = [](const RMatrix& x, const RMatrix& y) { return (x - y).cwiseAbs().maxCoeff() <= 1e-9; };
    for (size_t g = 0; g < maps.size() && closed; ++g) {
        if (close(maps[g], id)) closed = false;
        for (size_t h = g + 1; h < maps.size() && closed; ++h)
            if (close(maps[g], maps[h])) closed = false;
    }
    for (size_t g = 0; g < maps.size() && closed; ++g)
        for (size_t h = 0; h < maps.size() && closed; ++h) {
            const RMatrix c = maps[g] * maps[h];
            bool found = close(c, id);
            for (size_t k = 0; k < maps.size() && !found; ++k) found = close(c, maps[k]);
            closed = found;
        }
    l.group_closed_ = closed;
    l.elements_ = std::move(elements);
    l.finish();
    return l;
}

LipNorm LipNorm::direct_sum_max(std::shared_ptr<const LipNorm> la, std::shared_ptr<const LipNorm> lb,
                                std::shared_ptr<const Bridge> bridge, double denom) {
    require(la && lb && bridge, ErrorKind::Structural, "direct sum Lip-norm: missing component");
    require(denom > 0.0 && std::isfinite(denom), ErrorKind::Domain, "direct sum Lip-norm: denominator must be positive");
    require(bridge->a() == la->parent() && bridge->b() == lb->parent(), ErrorKind::Structural,
            "direct sum Lip-norm: bridge endpoints do not match the components");
    LipNorm l;
    l.kind_ = LipKind::DirectSumMax;
    l.parent_ = direct_sum(la->parent(), lb->parent());
    const int na = la->parent().linear_dim(), nb = lb->parent().linear_dim();
    l.ball_.dim = na + nb;
    for (const auto& c : la->ball().cons) {
        NormConstraint e = c;
        e.coeffs.resize(static_cast<size_t>(na + nb));
        l.ball_.cons.push_back(std::move(e));
    }
    for (const auto& c : lb->ball().cons) {
        NormConstraint e;
        e.scale = c.scale;
        e.coeffs.resize(static_cast<size_t>(na));
        for (const auto& m : c.coeffs) e.coeffs.push_back(m);
        l.ball_.cons.push_back(std::move(e));
    }
    const Algebra& d = bridge->d();
    const Element& w = bridge->pivot();
    std::vector<Element> ia, ib;
    for (int k = 0; k < na; ++k) ia.push_back(bridge->pi_a().apply(basis_element(la->parent(), k)) * w);
    for (int k = 0; k < nb; ++k) ib.push_back(w * bridge->pi_b().apply(basis_element(lb->parent(), k)));
    for (int t = 0; t < d.block_count(); ++t) {
        NormConstraint c;
        c.scale = denom;
        bool any = false;
        for (int k = 0; k < na + nb; ++k) {
            CMatrix m = k < na ? ia[static_cast<size_t>(k)].block(t) : CMatrix(-ib[static_cast<size_t>(k - na)].block(t));
            if (max_abs_entry(m) > 1e-15) {
                c.coeffs.push_back(std::move(m));
                any = true;
            } else {
                c.coeffs.emplace_back();
            }
        }
        if (any) l.ball_.cons.push_back(std::move(c));
    }
    l.la_ = std::move(la);
    l.lb_ = std::move(lb);
    l.bridge_ = std::move(bridge);
    l.denom_ = denom;
    l.finish();
    return l;
}

LipNorm LipNorm::polytope_custom(Algebra a, RMatrix functionals) {
    require(functionals.cols() == a.linear_dim(), ErrorKind::Structural,
            "polytope Lip-norm: functionals must act on sa coordinates");
    require(functionals.allFinite(), ErrorKind::Domain, "polytope Lip-norm: non-finite functional");
    LipNorm l;
    l.kind_ = LipKind::PolytopeCustom;
    l.parent_ = std::move(a);
    l.ball_.dim = l.parent_.linear_dim();
    for (Eigen::Index r = 0; r < functionals.rows(); ++r) {
        NormConstraint c;
        for (Eigen::Index k = 0; k < functionals.cols(); ++k) {
            if (functionals(r, k) != 0.0)
                c.coeffs.push_back(CMatrix::Constant(1, 1, functionals(r, k)));
            else
                c.coeffs.emplace_back();
        }
        l.ball_.cons.push_back(std::move(c));
    }
    l.functionals_ = std::move(functionals);
    l.finish();
    return l;
}

void LipNorm::finish() {
    polytopal_ = true;
    RVector g;
    for (const auto& c : ball_.cons)
        if (!scalar_row(c, g)) polytopal_ = false;
    const RMatrix k = kernel_matrix(*this);
    const int n = parent_.linear_dim();
    kernel_dim_ = n - (k.rows() ? real_rank(k, 1e-9) : 0);
    const RVector u = unit_coords(parent_);
    const double ku = k.rows() ? (k * u).norm() : 0.0;
    kernel_pass_ = kernel_dim_ == 1 && ku <= 1e-9 * std::max(1.0, u.norm());
}

RMatrix kernel_matrix(const LipNorm& l) {
    const BallRep& b = l.ball();
    Eigen::Index total = 0;
    for (const auto& c : b.cons) total += 2 * static_cast<Eigen::Index>(c.rows()) * c.cols();
    RMatrix k = RMatrix::Zero(total, b.dim);
    Eigen::Index row = 0;
    for (const auto& c : b.cons) {
        const int rr = c.rows(), cc = c.cols();
        for (int i = 0; i < rr; ++i)
            for (int j = 0; j < cc; ++j) {
                for (size_t v = 0; v < c.coeffs.size(); ++v) {
                    if (!c.coeffs[v].size()) continue;
                    k(row, static_cast<Eigen::Index>(v)) = c.coeffs[v](i, j).real() / c.scale;
                    k(row + 1, static_cast<Eigen::Index>(v)) = c.coeffs[v](i, j).imag() / c.scale;
                }
                row += 2;
            }
    }
    return k;
}

// ---------------------------------------------------------------- evaluation

double eval_lipnorm(const LipNorm& l, const Element& a) {
    require(a.parent() == l.parent(), ErrorKind::Structural, "Lip-norm: element belongs to another algebra");
    require(a.is_selfadjoint(1e-12 * std::max(1.0, a.max_abs_entry())), ErrorKind::Domain,
            "Lip-norm: element is not self-adjoint");
    switch (l.kind()) {
        case LipKind::FiniteLipschitz: {
            const int n = l.space().size();
            double m = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    m = std::max(m, std::abs(a.block(i)(0, 0).real() - a.block(j)(0, 0).real()) / l.space()(i, j));
            return m;
        }
        case LipKind::ErgodicAction: {
            double m = 0.0;
            for (const auto& g : l.elements()) m = std::max(m, op_norm(act(g, a) - a) / g.length);
            return m;
        }
        case LipKind::DirectSumMax: {
            const Algebra& pa = l.la()->parent();
            const Algebra& pb = l.lb()->parent();
            std::vector<CMatrix> ba(a.blocks().begin(), a.blocks().begin() + pa.block_count());
            std::vector<CMatrix> bb(a.blocks().begin() + pa.block_count(), a.blocks().end());
            const Element ea(pa, std::move(ba)), eb(pb, std::move(bb));
            return std::max({eval_lipnorm(*l.la(), ea), eval_lipnorm(*l.lb(), eb),
                             bridge_seminorm(*l.bridge(), ea, eb) / l.denom()});
        }
        case LipKind::PolytopeCustom: {
            const RVector x = sa_coords(a);
            return l.functionals().rows() ? (l.functionals() * x).cwiseAbs().maxCoeff() : 0.0;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------- slices

Slice lip_ball_slice_set(const LipNorm& l, const State& basepoint, double r) {
    require(basepoint.parent() == l.parent(), ErrorKind::Structural, "slice: basepoint belongs to another algebra");
    const RVector f = state_functional(basepoint);
    Slice s;
    s.basis = real_null_space(RMatrix(f.transpose()), 1e-12);
    s.set = ball_param_set(l.ball(), s.basis, r);
    return s;
}

VertexSet lip_ball_slice(const LipNorm& l, const State& basepoint, int dim_limit) {
    require(l.polytopal(), ErrorKind::Unsupported, std::string("slice vertices: ") + lip_kind_name(l.kind()) +
                                                       " Lip-ball is not a polytope");
    require(l.kernel_pass(), ErrorKind::Domain, "slice vertices: Lip-norm kernel is larger than the constants");
    const Slice s = lip_ball_slice_set(l, basepoint);
    VertexSet out;
    out.basis = s.basis;
    const int d = static_cast<int>(s.basis.cols());
    require(d <= dim_limit, ErrorKind::Resource, "slice vertices: dimension " + std::to_string(d) + " exceeds limit " +
                                                     std::to_string(dim_limit));
    if (d == 0) {
        out.coords.push_back(RVector(0));
    } else {
        out.coords = enum_vertices(Polytope(s.set.a, s.set.b), dim_limit);
    }
    for (const auto& y : out.coords) {
        RVector x = d ? RVector(s.basis * y) : RVector(RVector::Zero(l.parent().linear_dim()));
        for (Eigen::Index k = 0; k < x.size(); ++k)
            if (std::abs(x(k)) < 1e-13) x(k) = 0.0;
        out.elements.push_back(from_sa_coords(l.parent(), x));
        out.sa.push_back(std::move(x));
    }
    return out;
}

// ---------------------------------------------------------------- radius bounds

double centered_radius_bound(const LipNorm& l) {
    const int n = l.parent().linear_dim();
    if (n == 1) return 0.0;
    if (!l.kernel_pass()) return kInf;
    if (l.kind() == LipKind::FiniteLipschitz) return 0.5 * l.space().diameter();

    // ||a - tau 1||_op <= ||a - tau 1||_HS <= ||K a|| / sigma_min, ||K a||^2 <= sum_k rank_k
    const RMatrix k = kernel_matrix(l);
    Eigen::JacobiSVD<RMatrix> svd(k);
    const RVector& sv = svd.singularValues();
    double r = kInf;
    if (sv.size() >= n - 1 && sv(n - 2) > 0.0) {
        double ranks = 0.0;
        for (const auto& c : l.ball().cons) ranks += std::min(c.rows(), c.cols());
        r = std::sqrt(ranks) / sv(n - 2) * (1.0 + 1e-12);
    }
    if (l.kind() == LipKind::ErgodicAction && l.group_closed()) {
        // a - E(a) = mean over G of (a - alpha_g(a)), and E(a) is scalar by ergodicity
        double s = 0.0;
        for (const auto& g : l.elements()) s += g.length;
        r = std::min(r, s / static_cast<double>(l.elements().size() + 1));
    }
    if (l.kind() == LipKind::DirectSumMax) {
        const double ra = centered_radius_bound(*l.la()), rb = centered_radius_bound(*l.lb());
        const double wn = op_norm(l.bridge()->pivot());
        r = std::min(r, std::max(ra, rb) + 0.5 * (l.denom() / wn + ra + rb));
    }
    return r;
}

double diameter_upper_bound(const LipNorm& l) { return 2.0 * centered_radius_bound(l); }

// ---------------------------------------------------------------- Monge-Kantorovich

MkResult mk_distance_witness(const LipNorm& l, const State& phi, const State& psi, const MetricOptions& opt) {
    require(phi.parent() == l.parent() && psi.parent() == l.parent(), ErrorKind::Structural,
            "mk: states belong to another algebra");
    require(l.kernel_pass(), ErrorKind::Domain, "mk: Lip-norm kernel is larger than the constants");
    const Algebra& alg = l.parent();
    const int n = alg.linear_dim();
    MkResult out;
    out.witness = Element::zero(alg);
    if (n == 1) {
        out.value = CertifiedValue::exact(0.0);
        return out;
    }
    // the Lip-ball is symmetric, so solve with a canonical orientation: mk(phi, psi) and
    // mk(psi, phi) then run the identical program and agree bit for bit
    const RVector fp = state_functional(phi), fq = state_functional(psi);
    const bool flip = lex_less(fq, fp, 0.0);
    const RVector w = flip ? RVector(fq - fp) : RVector(fp - fq);
    auto orient = [&](MkResult& r) {
        if (flip) r.witness = -1.0 * r.witness;
        return r;
    };
    const Slice s = lip_ball_slice_set(l, State::tracial(alg));
    const RVector c = s.basis.transpose() * w;
    if (c.cwiseAbs().maxCoeff() == 0.0) {
        out.value = CertifiedValue::exact(0.0);
        return out;
    }
    const SliceMax m = maximize_on_slice(l, s, c, opt);
    RVector x = s.basis * m.y;
    Element a = from_sa_coords(alg, x);
    if (!m.exact) {
        const double la = eval_lipnorm(l, a);
        if (la > 1.0) {
            x /= la;
            a = from_sa_coords(alg, x);
        }
    }
    out.witness = a;
    const double lower = std::max(0.0, w.dot(x));
    out.value = CertifiedValue{lower, lower, std::max(lower, m.upper), m.exact ? Method::ExactLp : Method::Iterative,
                               m.iterations, m.certified ? std::string() : std::string("uncertified-upper")};
    return orient(out);
}

SliceMax maximize_on_slice(const LipNorm& l, const Slice& s, const RVector& c, const MetricOptions& opt) {
    SliceMax out;
    if (c.size() == 0) {
        out.y = RVector(0);
        out.exact = true;
        return out;
    }
    if (s.set.lmis.empty()) {
        LinearProgram lp = make_lp(static_cast<int>(c.size()), true);
        lp.objective = c;
        lp.constraints = s.set.a;
        lp.rhs = s.set.b;
        lp.senses.assign(static_cast<size_t>(s.set.a.rows()), Sense::LessEqual);
        const LpSolution sol = solve_lp(lp);
        require(sol.status == LpStatus::Optimal, ErrorKind::Solver,
                std::string("slice LP not optimal: ") + lp_status_name(sol.status));
        out.y = sol.x;
        out.upper = std::max(sol.value, sol.dual_value);
        out.exact = true;
        out.iterations = sol.iterations;
        return out;
    }
    ConicProgram p(static_cast<int>(c.size()));
    p.objective = c;
    p.ineq_a = s.set.a;
    p.ineq_b = s.set.b;
    p.lmis = s.set.lmis;
    p.start = RVector::Zero(c.size());
    // on the tracial slice |y_j| <= ||a||_HS <= sqrt(rep_dim) ||a|| <= sqrt(rep_dim) diam
    const double box = std::sqrt(static_cast<double>(l.parent().rep_dim())) * diameter_upper_bound(l);
    if (std::isfinite(box)) p.box = RVector::Constant(c.size(), box);
    ConicOptions co;
    co.gap_tol = opt.gap_tol;
    const ConicSolution sol = solve_conic(p, co);
    require(sol.status == ConicStatus::Optimal || sol.status == ConicStatus::IterationLimit, ErrorKind::Solver,
            std::string("slice conic solve failed: ") + conic_status_name(sol.status));
    out.y = sol.x;
    out.upper = sol.upper;
    out.certified = sol.certified && std::isfinite(box);
    out.iterations = sol.iterations;
    return out;
}

CertifiedValue mk_distance(const LipNorm& l, const State& phi, const State& psi, const MetricOptions& opt) {
    return mk_distance_witness(l, phi, psi, opt).value;
}

namespace {

double spread(const Element& a) {
    double hi = -kInf, lo = kInf;
    for (const auto& b : a.blocks()) {
        const HermitianEigen e = hermitian_eigen(b);
        hi = std::max(hi, e.values(e.values.size() - 1));
        lo = std::min(lo, e.values(0));
    }
    return hi - lo;
}

// vector states at the top and bottom eigenvectors of a
std::pair<State, State> extreme_states(const Element& a) {
    const Algebra& alg = a.parent();
    double hi = -kInf, lo = kInf;
    int bh = 0, bl = 0;
    CVector vh, vl;
    for (int i = 0; i < alg.block_count(); ++i) {
        const HermitianEigen e = hermitian_eigen(a.block(i));
        const Eigen::Index last = e.values.size() - 1;
        if (e.values(last) > hi) {
            hi = e.values(last);
            bh = i;
            vh = e.vectors.col(last);
        }
        if (e.values(0) < lo) {
            lo = e.values(0);
            bl = i;
            vl = e.vectors.col(0);
        }
    }
    return {State::vector_state(alg, bh, vh), State::vector_state(alg, bl, vl)};
}

}  // namespace

CertifiedValue state_diameter(const LipNorm& l, const MetricOptions& opt) {
    require(l.kernel_pass(), ErrorKind::Domain, "diameter: Lip-norm kernel is larger than the constants");
    const Algebra& alg = l.parent();
    if (alg.linear_dim() == 1) return CertifiedValue::exact(0.0);
    const double upper_bound = diameter_upper_bound(l);

    if (l.polytopal() && alg.is_commutative()) {
        // pure states are Diracs and mk is jointly convex
        const int n = alg.block_count();
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
        std::vector<CertifiedValue> vals(pairs.size());
        parallel_for(static_cast<int>(pairs.size()), opt.threads, [&](int k) {
            const auto [i, j] = pairs[static_cast<size_t>(k)];
            vals[static_cast<size_t>(k)] = mk_distance(l, State::dirac(alg, i), State::dirac(alg, j), opt);
        });
        CertifiedValue best = CertifiedValue::exact(0.0);
        for (const auto& v : vals) best = cv_max(best, v);
        return best;
    }
    if (l.polytopal() && alg.linear_dim() - 1 <= opt.vertex_limit) {
        // sup over the Lip-ball of lambda_max - lambda_min is a convex maximization
        const VertexSet vs = lip_ball_slice(l, State::tracial(alg), opt.vertex_limit);
        double best = 0.0;
        for (const auto& e : vs.elements) best = std::max(best, spread(e));
        return CertifiedValue::exact(best, Method::VertexEnum);
    }

    // pure-state ascent: each step re-solves mk between the extreme eigenvector states of the last witness
    const int starts = std::max(1, opt.ascent_starts);
    std::vector<double> best(static_cast<size_t>(starts), 0.0);
    std::vector<int> iters(static_cast<size_t>(starts), 0);
    parallel_for(starts, opt.threads, [&](int s) {
        Rng rng(opt.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(s + 1));
        State phi = random_pure_state(alg, rng), psi = random_pure_state(alg, rng);
        double cur = 0.0;
        for (int step = 0; step < opt.ascent_steps; ++step) {
            const MkResult r = mk_distance_witness(l, phi, psi, opt);
            iters[static_cast<size_t>(s)] += r.value.iterations;
            const double v = spread(r.witness);
            if (v <= cur + 1e-10) {
                cur = std::max(cur, v);
                break;
            }
            cur = v;
            std::tie(phi, psi) = extreme_states(r.witness);
        }
        best[static_cast<size_t>(s)] = cur;
    });
    CertifiedValue out;
    out.method = Method::Iterative;
    for (size_t s = 0; s < best.size(); ++s) {
        out.lower = std::max(out.lower, best[s]);
        out.iterations += iters[s];
    }
    out.value = out.lower;
    out.upper = std::max(out.lower, upper_bound);
    out.note = "lower-bound-only: pure-state ascent";
    return out;
}

// ---------------------------------------------------------------- verifiers

LipnormCheck check_lipnorm(const LipNorm& l, const MetricOptions& opt) {
    LipnormCheck out;
    out.report.name = "kernel";
    out.kernel_dim = l.kernel_dim();
    out.kernel_pass = l.kernel_pass();
    out.report.metric("kernel_dim", l.kernel_dim());
    if (!out.kernel_pass) {
        out.report.fail("kernel of L on sa(A) has dimension " + std::to_string(l.kernel_dim()) +
                        " (the constants alone would give 1)");
        out.slice_radius.note = "not computed: kernel failure";
        return out;
    }
    const Algebra& alg = l.parent();
    if (alg.linear_dim() == 1) {
        out.slice_radius = CertifiedValue::exact(0.0, Method::VertexEnum);
        out.report.notes.push_back("one-dimensional algebra: L vanishes identically and sa(A) = R1");
    } else if (l.polytopal() && alg.linear_dim() - 1 <= opt.vertex_limit) {
        const VertexSet vs = lip_ball_slice(l, State::tracial(alg), opt.vertex_limit);
        double r = 0.0;
        for (const auto& e : vs.elements) r = std::max(r, op_norm(e));
        out.slice_radius = CertifiedValue::exact(r, Method::VertexEnum);
    } else {
        // on the tracial slice ||a|| = sup_psi |(psi - tr)(a)| <= diameter
        Rng rng(opt.seed);
        double lower = 0.0;
        for (int k = 0; k < 4; ++k) {
            const State phi = random_pure_state(alg, rng);
            lower = std::max(lower, op_norm(mk_distance_witness(l, phi, State::tracial(alg), opt).witness));
        }
        out.slice_radius = CertifiedValue{lower, lower, std::max(lower, diameter_upper_bound(l)), Method::Iterative, 0,
                                          "upper from diameter bound"};
    }
    out.report.metric("slice_radius_upper", out.slice_radius.upper);
    if (!std::isfinite(out.slice_radius.upper)) out.report.fail("slice radius is not bounded");
    return out;
}

namespace {

std::string coords_text(const Element& a) {
    std::ostringstream os;
    os.precision(6);
    const RVector x = sa_coords(a);
    os << "[";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
    os << "]";
    return os.str();
}

}  // namespace

Report check_leibniz(const LipNorm& l, int samples, std::uint64_t seed, const MetricOptions& opt) {
    Report rep;
    rep.name = "leibniz";
    const Algebra& alg = l.parent();
    Rng rng(seed);
    std::uniform_real_distribution<double> scale(0.25, 4.0);
    std::vector<std::pair<Element, Element>> pairs;
    for (int k = 0; k < samples; ++k) {
        Element a = random_selfadjoint(alg, rng, scale(rng));
        Element b = random_selfadjoint(alg, rng, scale(rng));
        pairs.emplace_back(std::move(a), std::move(b));
    }
    // extreme points of the Lip-ball are the natural stress cases
    if (l.polytopal() && l.kernel_pass() && alg.linear_dim() > 1 && alg.linear_dim() - 1 <= opt.vertex_limit) {
        const VertexSet vs = lip_ball_slice(l, State::tracial(alg), opt.vertex_limit);
        const size_t m = std::min<size_t>(vs.elements.size(), 24);
        for (size_t i = 0; i < m; ++i)
            for (size_t j = i; j < m; ++j) pairs.emplace_back(vs.elements[i], vs.elements[j]);
    }
    int violations = 0, strong_checked = 0, strong_violations = 0;
    double worst = -kInf;
    for (const auto& [a, b] : pairs) {
        const double la = eval_lipnorm(l, a), lb = eval_lipnorm(l, b);
        const double rhs = op_norm(a) * lb + op_norm(b) * la;
        const auto [j, lie] = jordan_lie(a, b);
        const double lj = eval_lipnorm(l, j), ll = eval_lipnorm(l, lie);
        const double tol = 1e-9 + 1e-12 * rhs;
        worst = std::max(worst, std::max(lj, ll) - rhs);
        if (lj > rhs + tol || ll > rhs + tol) {
            ++violations;
            if (violations <= 5) {
                std::ostringstream os;
                os << "L(a o b) = " << lj << ", L({a,b}) = " << ll << " > " << rhs << " with a = " << coords_text(a)
                   << ", b = " << coords_text(b);
                rep.fail(os.str());
            }
        }
        // strong Leibniz for invertible samples, informational
        bool invertible = true;
        std::vector<CMatrix> inv;
        for (const auto& blk : a.blocks()) {
            const HermitianEigen e = hermitian_eigen(blk);
            if (e.values.cwiseAbs().minCoeff() < 1e-3 * std::max(1.0, e.values.cwiseAbs().maxCoeff())) {
                invertible = false;
                break;
            }
            inv.push_back(e.vectors * e.values.cwiseInverse().asDiagonal() * e.vectors.adjoint());
        }
        if (invertible) {
            ++strong_checked;
            Element ai(alg, inv);
            ai = 0.5 * (ai + ai.adjoint());
            const double ni = op_norm(ai);
            if (eval_lipnorm(l, ai) > ni * ni * la + 1e-9 + 1e-12 * ni * ni * la) ++strong_violations;
        }
    }
    rep.metric("samples", static_cast<double>(pairs.size()));
    rep.metric("violations", violations);
    rep.metric("worst_excess", worst);
    rep.metric("strong_checked", strong_checked);
    rep.metric("strong_violations", strong_violations);
    return rep;
}

}  // namespace qgp
