#include "qgp/lp.hpp"

#include <cmath>
#include <sstream>

#include "qgp/errors.hpp"

namespace qgp {

void LinearProgram::add_row(const RVector& a, Sense s, double b) {
    const Eigen::Index r = constraints.rows();
    if (constraints.cols() != a.size()) {
        require(r == 0, ErrorKind::Structural, "lp: row length does not match the variable count");
        constraints.resize(0, a.size());
    }
    constraints.conservativeResize(r + 1, a.size());
    constraints.row(r) = a.transpose();
    rhs.conservativeResize(r + 1);
    rhs(r) = b;
    senses.push_back(s);
}

LinearProgram make_lp(int num_vars, bool maximize) {
    LinearProgram p;
    p.objective = RVector::Zero(num_vars);
    p.maximize = maximize;
    p.constraints.resize(0, num_vars);
    p.rhs.resize(0);
    return p;
}

const char* lp_status_name(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

namespace {

// Dense tableau: rows 0..m-1 constraints, row m reduced costs; last column rhs.
struct Tableau {
    RMatrix t;
    std::vector<int> basis;
    int m = 0;
    int n = 0;  // structural + slack (+ artificial) columns
};

void pivot(Tableau& tb, int r, int c) {
    const double piv = tb.t(r, c);
    tb.t.row(r) /= piv;
    for (int i = 0; i <= tb.m; ++i) {
        if (i == r) continue;
        const double f = tb.t(i, c);
        if (f != 0.0) tb.t.row(i) -= f * tb.t.row(r);
    }
    tb.basis[static_cast<size_t>(r)] = c;
}

std::string basis_string(const std::vector<int>& basis) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < basis.size(); ++i) os << (i ? "," : "") << basis[i];
    os << "]";
    return os.str();
}

enum class RunResult { Optimal, Unbounded };

// Bland's rule over columns [0, active).
RunResult run_simplex(Tableau& tb, int active, const LpOptions& opt, int& iterations) {
    const int rhs = tb.n;
    while (true) {
        if (iterations >= opt.max_iterations)
            fail(ErrorKind::Solver, "simplex iteration cap reached; last basis " + basis_string(tb.basis));
        int enter = -1;
        for (int j = 0; j < active; ++j) {
            if (tb.t(tb.m, j) < -opt.cost_tol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) return RunResult::Optimal;
        int leave = -1;
        double best = kInf;
        for (int i = 0; i < tb.m; ++i) {
            const double a = tb.t(i, enter);
            if (a <= opt.pivot_tol) continue;
            const double ratio = tb.t(i, rhs) / a;
            const double slack = 1e-12 * std::max(1.0, std::abs(best));
            if (leave < 0 || ratio < best - slack ||
                (ratio <= best + slack && tb.basis[static_cast<size_t>(i)] < tb.basis[static_cast<size_t>(leave)])) {
                best = std::min(best, ratio);
                leave = i;
            }
        }
        if (leave < 0) return RunResult::Unbounded;
        pivot(tb, leave, enter);
        ++iterations;
        if (!tb.t.allFinite())
            fail(ErrorKind::Solver, "simplex numeric breakdown; last basis " + basis_string(tb.basis));
    }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& p, const LpOptions& opt) {
    const int nv = p.num_vars();
    const int nr = static_cast<int>(p.constraints.rows());
    require(p.constraints.cols() == nv || nr == 0, ErrorKind::Structural, "lp: constraint matrix width mismatch");
    require(static_cast<int>(p.senses.size()) == nr && p.rhs.size() == nr, ErrorKind::Structural,
            "lp: senses/rhs length mismatch");
    require(p.objective.allFinite() && p.constraints.allFinite() && p.rhs.allFinite(), ErrorKind::Domain,
            "lp: non-finite data");
    RVector lo = p.lower.size() == nv ? p.lower : RVector::Constant(nv, -kInf);
    RVector hi = p.upper.size() == nv ? p.upper : RVector::Constant(nv, kInf);

    // x = offset + T z, z >= 0
    RVector offset = RVector::Zero(nv);
    std::vector<std::pair<int, double>> zmap;  // z column -> (x index, coefficient)
    std::vector<std::pair<int, double>> ub_rows;  // z column with upper bound
    for (int j = 0; j < nv; ++j) {
        const double l = lo(j), u = hi(j);
        require(!(l > u), ErrorKind::Domain, "lp: lower bound exceeds upper bound");
        if (std::isfinite(l)) {
            offset(j) = l;
            zmap.push_back({j, 1.0});
            if (std::isfinite(u)) ub_rows.push_back({static_cast<int>(zmap.size()) - 1, u - l});
        } else if (std::isfinite(u)) {
            offset(j) = u;
            zmap.push_back({j, -1.0});
        } else {
            zmap.push_back({j, 1.0});
            zmap.push_back({j, -1.0});
        }
    }
    const int nz = static_cast<int>(zmap.size());
    const int m = nr + static_cast<int>(ub_rows.size());

    RMatrix a = RMatrix::Zero(m, nz);
    RVector b(m);
    std::vector<Sense> sense(static_cast<size_t>(m));
    for (int i = 0; i < nr; ++i) {
        for (int k = 0; k < nz; ++k) a(i, k) = p.constraints(i, zmap[static_cast<size_t>(k)].first) *
                                               zmap[static_cast<size_t>(k)].second;
        b(i) = p.rhs(i) - p.constraints.row(i).dot(offset);
        sense[static_cast<size_t>(i)] = p.senses[static_cast<size_t>(i)];
    }
    for (size_t r = 0; r < ub_rows.size(); ++r) {
        const int i = nr + static_cast<int>(r);
        a(i, ub_rows[r].first) = 1.0;
        b(i) = ub_rows[r].second;
        sense[static_cast<size_t>(i)] = Sense::LessEqual;
    }
    RVector cz(nz);  // minimize cz . z
    const double sgn = p.maximize ? -1.0 : 1.0;
    for (int k = 0; k < nz; ++k)
        cz(k) = sgn * p.objective(zmap[static_cast<size_t>(k)].first) * zmap[static_cast<size_t>(k)].second;

    // slack columns
    int nslack = 0;
    for (Sense s : sense)
        if (s != Sense::Equal) ++nslack;
    const int ns = nz + nslack;  // structural + slack
    RMatrix as = RMatrix::Zero(m, ns);
    as.leftCols(nz) = a;
    RVector flip = RVector::Ones(m);
    {
        int c = nz;
        for (int i = 0; i < m; ++i) {
            if (sense[static_cast<size_t>(i)] == Sense::LessEqual) as(i, c++) = 1.0;
            else if (sense[static_cast<size_t>(i)] == Sense::GreaterEqual) as(i, c++) = -1.0;
        }
    }
    for (int i = 0; i < m; ++i)
        if (b(i) < 0.0) {
            as.row(i) *= -1.0;
            b(i) = -b(i);
            flip(i) = -1.0;
        }
    RVector cs = RVector::Zero(ns);
    cs.head(nz) = cz;

    // phase one
    Tableau tb;
    tb.m = m;
    tb.n = ns + m;
    tb.t = RMatrix::Zero(m + 1, tb.n + 1);
    tb.t.block(0, 0, m, ns) = as;
    tb.t.block(0, ns, m, m) = RMatrix::Identity(m, m);
    tb.t.block(0, tb.n, m, 1) = b;
    tb.basis.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) tb.basis[static_cast<size_t>(i)] = ns + i;
    for (int i = 0; i < m; ++i) {
        tb.t.row(m).head(ns) -= as.row(i);
        tb.t(m, tb.n) -= b(i);
    }
    LpSolution sol;
    int iters = 0;
    run_simplex(tb, tb.n, opt, iters);
    const double phase1 = -tb.t(m, tb.n);
    if (phase1 > opt.feasibility_tol * std::max(1.0, b.lpNorm<Eigen::Infinity>())) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iters;
        return sol;
    }
    // drive artificials out of the basis; rows that cannot be cleaned are redundant
    std::vector<int> keep_rows;
    for (int i = 0; i < m; ++i) {
        if (tb.basis[static_cast<size_t>(i)] < ns) {
            keep_rows.push_back(i);
            continue;
        }
        int col = -1;
        for (int j = 0; j < ns; ++j)
            if (std::abs(tb.t(i, j)) > 1e-9) {
                col = j;
                break;
            }
        if (col >= 0) {
            pivot(tb, i, col);
            ++iters;
            keep_rows.push_back(i);
        }
    }
    // phase two tableau on kept rows, artificial columns dropped
    Tableau t2;
    t2.m = static_cast<int>(keep_rows.size());
    t2.n = ns;
    t2.t = RMatrix::Zero(t2.m + 1, ns + 1);
    for (int r = 0; r < t2.m; ++r) {
        const int i = keep_rows[static_cast<size_t>(r)];
        t2.t.row(r).head(ns) = tb.t.row(i).head(ns);
        t2.t(r, ns) = std::max(0.0, tb.t(i, tb.n));
        t2.basis.push_back(tb.basis[static_cast<size_t>(i)]);
    }
    t2.t.row(t2.m).head(ns) = cs.transpose();
    for (int r = 0; r < t2.m; ++r) {
        const double c = cs(t2.basis[static_cast<size_t>(r)]);
        if (c != 0.0) t2.t.row(t2.m) -= c * t2.t.row(r);
    }
    const RunResult res = run_simplex(t2, ns, opt, iters);
    sol.iterations = iters;
    if (res == RunResult::Unbounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    RVector z = RVector::Zero(ns);
    for (int r = 0; r < t2.m; ++r) z(t2.basis[static_cast<size_t>(r)]) = t2.t(r, ns);
    RVector x = offset;
    for (int k = 0; k < nz; ++k) x(zmap[static_cast<size_t>(k)].first) += zmap[static_cast<size_t>(k)].second * z(k);
    sol.status = LpStatus::Optimal;
    sol.x = x;
    sol.value = p.objective.dot(x);

    // duals from the optimal basis: B^T y = c_B on the kept rows
    RMatrix bmat(t2.m, t2.m);
    RVector cb(t2.m);
    RMatrix akeep(t2.m, ns);
    RVector bkeep(t2.m);
    for (int r = 0; r < t2.m; ++r) {
        akeep.row(r) = as.row(keep_rows[static_cast<size_t>(r)]);
        bkeep(r) = b(keep_rows[static_cast<size_t>(r)]);
    }
    for (int r = 0; r < t2.m; ++r) {
        bmat.col(r) = akeep.col(t2.basis[static_cast<size_t>(r)]);
        cb(r) = cs(t2.basis[static_cast<size_t>(r)]);
    }
    RVector y = RVector::Zero(t2.m);
    if (t2.m > 0) {
        Eigen::FullPivLU<RMatrix> lu(bmat.transpose());
        if (!lu.isInvertible())
            fail(ErrorKind::Solver, "simplex: singular optimal basis " + basis_string(t2.basis));
        y = lu.solve(cb);
    }
    const RVector reduced = cs - akeep.transpose() * y;
    sol.dual_residual = std::max(0.0, -reduced.minCoeff());
    const double primal_std = cs.dot(z);
    const double dual_std = bkeep.dot(y);
    sol.duality_gap = std::abs(primal_std - dual_std);
    const double constant = p.objective.dot(offset);
    sol.dual_value = (p.maximize ? -dual_std : dual_std) + constant;

    sol.row_duals = RVector::Zero(nr);
    for (int r = 0; r < t2.m; ++r) {
        const int i = keep_rows[static_cast<size_t>(r)];
        if (i < nr) sol.row_duals(i) = y(r) * flip(i) * (p.maximize ? -1.0 : 1.0);
    }

    double viol = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double ax = p.constraints.row(i).dot(x);
        switch (p.senses[static_cast<size_t>(i)]) {
            case Sense::LessEqual: viol = std::max(viol, ax - p.rhs(i)); break;
            case Sense::GreaterEqual: viol = std::max(viol, p.rhs(i) - ax); break;
            case Sense::Equal: viol = std::max(viol, std::abs(ax - p.rhs(i))); break;
        }
    }
    for (int j = 0; j < nv; ++j) {
        viol = std::max(viol, lo(j) - x(j));
        viol = std::max(viol, x(j) - hi(j));
    }
    sol.primal_residual = std::max(0.0, viol);
    return sol;
}

}  // namespace qgp
