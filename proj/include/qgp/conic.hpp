#pragma once

#include <string>
#include <vector>

#include "qgp/linalg.hpp"
#include "qgp/lp.hpp"

namespace qgp {

/** Affine Hermitian pencil F(x) = constant + sum_j x_j coeffs[j]; empty coeffs[j] means zero. */
struct Lmi {
    CMatrix constant;
    std::vector<CMatrix> coeffs;

    int size() const { return static_cast<int>(constant.rows()); }
    CMatrix eval(const RVector& x) const;
};

/**
 * maximize objective . x  subject to  ineq_a x <= ineq_b  and  F_k(x) >= 0 (PSD).
 * Without LMIs the problem is handed to the simplex solver; otherwise a log-det
 * barrier path-following method runs from `start`, which must be strictly feasible.
 */
struct ConicProgram {
    int num_vars = 0;
    RVector objective;
    RMatrix ineq_a;
    RVector ineq_b;
    std::vector<Lmi> lmis;
    RVector start;
    // certified bound |x_j| <= box_j on the feasible set; used to account for the
    // dual residual in the upper bound. Empty means unknown.
    RVector box;

    explicit ConicProgram(int n = 0);
    void add_row(const RVector& a, double b);
    // |a . x + c| <= b as two rows
    void add_abs_row(const RVector& a, double c, double b);
};

struct ConicOptions {
    double gap_tol = 1e-8;   // absolute target on upper - lower
    double growth = 8.0;     // barrier parameter multiplier per outer step
    int max_newton = 3000;
    double newton_tol = 1e-10;
};

enum class ConicStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct ConicSolution {
    ConicStatus status = ConicStatus::Optimal;
    RVector x;
    double value = 0.0;  // objective at x (a certified lower bound: x is feasible)
    double upper = 0.0;  // certified upper bound on the optimum
    bool exact = false;  // simplex path
    bool certified = true;
    int iterations = 0;
    RVector row_duals;              // multipliers >= 0 on ineq rows
    std::vector<CMatrix> lmi_duals;  // Z_k >= 0
};

ConicSolution solve_conic(const ConicProgram& p, const ConicOptions& opt = {});

const char* conic_status_name(ConicStatus s);

}  // namespace qgp
