#include "qgp/conic.hpp"

#include <cmath>

#include "qgp/errors.hpp"

namespace qgp {

CMatrix Lmi::eval(const RVector& x) const {
    CMatrix f = constant;
    for (size_t j = 0; j < coeffs.size(); ++j)
        if (coeffs[j].size() != 0 && x(static_cast<Eigen::Index>(j)) != 0.0) f += x(static_cast<Eigen::Index>(j)) * coeffs[j];
    return f;
}

ConicProgram::ConicProgram(int n) : num_vars(n), objective(RVector::Zero(n)), ineq_a(0, n), ineq_b(0) {}

void ConicProgram::add_row(const RVector& a, double b) {
    const Eigen::Index r = ineq_a.rows();
    ineq_a.conservativeResize(r + 1, num_vars);
    ineq_a.row(r) = a.transpose();
    ineq_b.conservativeResize(r + 1);
    ineq_b(r) = b;
}

void ConicProgram::add_abs_row(const RVector& a, double c, double b) {
    add_row(a, b - c);
    add_row(-a, b + c);
}

const char* conic_status_name(ConicStatus s) {
    switch (s) {
        case ConicStatus::Optimal: return "optimal";
        case ConicStatus::Infeasible: return "infeasible";
        case ConicStatus::Unbounded: return "unbounded";
        case ConicStatus::IterationLimit: return "iteration-limit";
    }
    return "?";
}

namespace {

ConicSolution solve_by_simplex(const ConicProgram& p) {
    LinearProgram lp = make_lp(p.num_vars, true);
    lp.objective = p.objective;
    lp.constraints = p.ineq_a;
    lp.rhs = p.ineq_b;
    lp.senses.assign(static_cast<size_t>(p.ineq_a.rows()), Sense::LessEqual);
    const LpSolution s = solve_lp(lp);
    ConicSolution out;
    out.exact = true;
    out.iterations = s.iterations;
    if (s.status == LpStatus::Infeasible) {
        out.status = ConicStatus::Infeasible;
        return out;
    }
    if (s.status == LpStatus::Unbounded) {
        out.status = ConicStatus::Unbounded;
        return out;
    }
    out.x = s.x;
    out.value = s.value;
    out.upper = std::max(s.value, s.dual_value);
    out.row_duals = s.row_duals;
    return out;
}

struct PencilTerms {
    // nonzero coefficient indices and matrices
    std::vector<int> idx;
    std::vector<const CMatrix*> mats;
};

class Barrier {
public:
    Barrier(const ConicProgram& p) : p_(p) {
        for (const Lmi& l : p.lmis) {
            require(static_cast<int>(l.coeffs.size()) == p.num_vars, ErrorKind::Structural,
                    "lmi: coefficient list must have one entry per variable");
            PencilTerms t;
            for (int j = 0; j < p.num_vars; ++j)
                if (l.coeffs[static_cast<size_t>(j)].size() != 0) {
                    t.idx.push_back(j);
                    t.mats.push_back(&l.coeffs[static_cast<size_t>(j)]);
                }
            terms_.push_back(std::move(t));
        }
        degree_ = static_cast<double>(p.ineq_a.rows());
        for (const Lmi& l : p.lmis) degree_ += l.size();
    }

    double degree() const { return degree_; }

    // barrier value, or +inf when x is not strictly feasible
    double phi(const RVector& x) const {
        double v = 0.0;
        if (p_.ineq_a.rows() > 0) {
            const RVector s = p_.ineq_b - p_.ineq_a * x;
            for (Eigen::Index i = 0; i < s.size(); ++i) {
                if (!(s(i) > 0.0)) return kInf;
                v -= std::log(s(i));
            }
        }
        for (const Lmi& l : p_.lmis) {
            const CMatrix f = l.eval(x);
            Eigen::LLT<CMatrix> llt(f);
            if (llt.info() != Eigen::Success) return kInf;
            const CMatrix& lm = llt.matrixLLT();
            for (Eigen::Index i = 0; i < lm.rows(); ++i) {
                const double dii = lm(i, i).real();
                if (!(dii > 0.0)) return kInf;
                v -= 2.0 * std::log(dii);
            }
        }
        return v;
    }

    // gradient and Hessian of the barrier; also returns slacks and inverse pencils
    void derivatives(const RVector& x, RVector& g, RMatrix& h, RVector& slack, std::vector<CMatrix>& finv) const {
        const int n = p_.num_vars;
        g = RVector::Zero(n);
        h = RMatrix::Zero(n, n);
        if (p_.ineq_a.rows() > 0) {
            slack = p_.ineq_b - p_.ineq_a * x;
            const RVector inv = slack.cwiseInverse();
            g += p_.ineq_a.transpose() * inv;
            h += p_.ineq_a.transpose() * inv.cwiseAbs2().asDiagonal() * p_.ineq_a;
        } else {
            slack.resize(0);
        }
        finv.clear();
        for (size_t k = 0; k < p_.lmis.size(); ++k) {
            const Lmi& l = p_.lmis[k];
            const CMatrix f = l.eval(x);
            Eigen::LLT<CMatrix> llt(f);
            CMatrix fi = llt.solve(CMatrix::Identity(f.rows(), f.cols()));
            fi = 0.5 * (fi + fi.adjoint()).eval();
            const PencilTerms& t = terms_[k];
            std::vector<CMatrix> w(t.idx.size());
            for (size_t a = 0; a < t.idx.size(); ++a) {
                w[a] = fi * (*t.mats[a]);
                g(t.idx[a]) -= w[a].trace().real();
            }
            for (size_t a = 0; a < t.idx.size(); ++a)
                for (size_t b = a; b < t.idx.size(); ++b) {
                    const double v = (w[a].cwiseProduct(w[b].transpose())).sum().real();
                    h(t.idx[a], t.idx[b]) += v;
                    if (a != b) h(t.idx[b], t.idx[a]) += v;
                }
            finv.push_back(std::move(fi));
        }
    }

private:
    const ConicProgram& p_;
    std::vector<PencilTerms> terms_;
    double degree_ = 0.0;
};

}  // namespace

ConicSolution solve_conic(const ConicProgram& p, const ConicOptions& opt) {
    require(p.objective.size() == p.num_vars, ErrorKind::Structural, "conic: objective length mismatch");
    require(p.ineq_a.cols() == p.num_vars || p.ineq_a.rows() == 0, ErrorKind::Structural,
            "conic: row width mismatch");
    if (p.lmis.empty()) return solve_by_simplex(p);

    require(p.start.size() == p.num_vars, ErrorKind::Structural, "conic: a strictly feasible start is required");
    Barrier bar(p);
    RVector x = p.start;
    require(std::isfinite(bar.phi(x)), ErrorKind::Domain, "conic: start point is not strictly feasible");

    const int n = p.num_vars;
    const RVector& c = p.objective;
    const double cnorm = std::max(c.norm(), 1e-12);
    double t = 1.0 / cnorm;
    ConicSolution out;
    out.status = ConicStatus::IterationLimit;
    int newton = 0;
    RVector g, slack;
    RMatrix h;
    std::vector<CMatrix> finv;

    // Dual point from the Newton linearization at (x, t): stationarity holds up to
    // the accuracy of the linear solve, and it is dual feasible once the step is
    // short in the local norm. Falls back to the plain central-path multipliers.
    auto certificate = [&](const RVector& xx, double tt) {
        bar.derivatives(xx, g, h, slack, finv);
        RMatrix hr = h;
        hr.diagonal().array() += 1e-14 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
        const RVector dx = -Eigen::LDLT<RMatrix>(hr).solve(g - tt * c);
        auto bound = [&](bool newton_dual) -> std::pair<double, bool> {
            RVector lambda(slack.size());
            std::vector<CMatrix> z;
            for (Eigen::Index i = 0; i < slack.size(); ++i) {
                double li = 1.0 / slack(i);
                if (newton_dual) li += p.ineq_a.row(i).dot(dx) / (slack(i) * slack(i));
                lambda(i) = li / tt;
            }
            for (size_t k = 0; k < p.lmis.size(); ++k) {
                CMatrix zk = finv[k];
                if (newton_dual) {
                    CMatrix df = CMatrix::Zero(zk.rows(), zk.cols());
                    for (int j = 0; j < n; ++j)
                        if (p.lmis[k].coeffs[static_cast<size_t>(j)].size() != 0)
                            df += dx(j) * p.lmis[k].coeffs[static_cast<size_t>(j)];
                    zk -= finv[k] * df * finv[k];
                    zk = 0.5 * (zk + zk.adjoint()).eval();
                }
                z.push_back(zk / tt);
            }
            if (newton_dual) {
                if (lambda.size() && lambda.minCoeff() < 0.0) return {kInf, false};
                for (const CMatrix& zk : z)
                    if (hermitian_eigen(zk).values(0) < 0.0) return {kInf, false};
            }
            RVector r = c;
            double dual = 0.0;
            if (lambda.size()) {
                r -= p.ineq_a.transpose() * lambda;
                dual += lambda.dot(p.ineq_b);
            }
            for (size_t k = 0; k < p.lmis.size(); ++k) {
                const Lmi& l = p.lmis[k];
                dual += (z[k] * l.constant).trace().real();
                for (int j = 0; j < n; ++j)
                    if (l.coeffs[static_cast<size_t>(j)].size() != 0)
                        r(j) += (z[k] * l.coeffs[static_cast<size_t>(j)]).trace().real();
            }
            bool certified = true;
            for (int j = 0; j < n; ++j) {
                if (r(j) == 0.0) continue;
                if (p.box.size() == n) {
                    dual += std::abs(r(j)) * p.box(j);
                } else {
                    dual += std::abs(r(j)) * 10.0 * std::max(1.0, std::abs(xx(j)));
                    certified = false;
                }
            }
            if (newton_dual || out.row_duals.size() == 0) {
                out.row_duals = lambda;
                out.lmi_duals = z;
            }
            return {dual, certified};
        };
        auto plain = bound(false);
        auto refined = dx.allFinite() ? bound(true) : std::pair<double, bool>{kInf, false};
        if (plain.second != refined.second) {
            const auto& cert = plain.second ? plain : refined;
            out.certified = true;
            return cert.first;
        }
        out.certified = plain.second;
        return std::min(plain.first, refined.first);
    };

    while (newton < opt.max_newton) {
        // centering by damped Newton on  -t c.x + phi(x)
        for (; newton < opt.max_newton; ++newton) {
            bar.derivatives(x, g, h, slack, finv);
            const RVector grad = g - t * c;
            const double reg = 1e-14 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
            RMatrix hr = h;
            hr.diagonal().array() += reg;
            Eigen::LDLT<RMatrix> ldlt(hr);
            RVector dx = -ldlt.solve(grad);
            if (!dx.allFinite()) fail(ErrorKind::Solver, "barrier: Newton system breakdown");
            const double dec = -grad.dot(dx);
            if (dec <= 2.0 * opt.newton_tol) break;
            const double f0 = -t * c.dot(x) + bar.phi(x);
            double alpha = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const RVector xn = x + alpha * dx;
                const double ph = bar.phi(xn);
                if (std::isfinite(ph) && -t * c.dot(xn) + ph <= f0 - 0.25 * alpha * dec) {
                    x = xn;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;  // numerically centered
            if (c.dot(x) > 1e12) {
                out.status = ConicStatus::Unbounded;
                out.x = x;
                out.value = c.dot(x);
                out.upper = kInf;
                out.iterations = newton;
                return out;
            }
        }
        const double upper = certificate(x, t);
        const double value = c.dot(x);
        out.x = x;
        out.value = value;
        out.upper = std::max(upper, value);
        out.iterations = newton;
        if (out.upper - value <= opt.gap_tol) {
            out.status = ConicStatus::Optimal;
            return out;
        }
        if (bar.degree() / t < 1e-3 * opt.gap_tol) break;  // residual-dominated; keep the honest gap
        t *= opt.growth;
    }
    if (out.x.size() == 0) {
        out.x = x;
        out.value = c.dot(x);
        out.upper = std::max(certificate(x, t), out.value);
        out.iterations = newton;
    }
    return out;
}

}  // namespace qgp
