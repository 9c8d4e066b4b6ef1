#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qgp/linalg.hpp"

namespace qgp {

enum class Sense { LessEqual, Equal, GreaterEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * optimize objective . x  subject to  constraints x (senses) rhs,  lower <= x <= upper.
 * Empty lower/upper vectors mean every variable is free.
 */
struct LinearProgram {
    RVector objective;
    bool maximize = true;
    RMatrix constraints;
    std::vector<Sense> senses;
    RVector rhs;
    RVector lower;
    RVector upper;

    int num_vars() const { return static_cast<int>(objective.size()); }
    // row helpers used by the builders in this library
    void add_row(const RVector& a, Sense s, double b);
};

LinearProgram make_lp(int num_vars, bool maximize = true);

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    RVector x;
    double value = 0.0;
    double dual_value = 0.0;
    double duality_gap = 0.0;
    double primal_residual = 0.0;  // max violation of rows and bounds
    double dual_residual = 0.0;    // max violation of reduced-cost signs
    RVector row_duals;             // one multiplier per original row
    int iterations = 0;
};

struct LpOptions {
    double pivot_tol = 1e-11;
    double cost_tol = 1e-10;
    double feasibility_tol = 1e-9;
    int max_iterations = 200000;
};

// Primal simplex, two phases, Bland's rule for entering and leaving variables.
LpSolution solve_lp(const LinearProgram& p, const LpOptions& opt = {});

const char* lp_status_name(LpStatus s);

}  // namespace qgp
