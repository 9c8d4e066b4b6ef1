#pragma once

#include <vector>

#include "qgp/certified.hpp"
#include "qgp/conic.hpp"
#include "qgp/polytope.hpp"

namespace qgp {

/** t -> M0 + sum_i t_i M_i, block diagonal (one matrix per block). */
struct AffineFamily {
    std::vector<CMatrix> m0;
    std::vector<std::vector<CMatrix>> mi;  // mi[i][block]

    int params() const { return static_cast<int>(mi.size()); }
    std::vector<CMatrix> eval(const RVector& t) const;
    double norm_at(const RVector& t) const;
};

/** Convex feasible set for the parameters: rows a t <= b plus optional LMIs. */
struct ParamSet {
    RMatrix a;
    RVector b;
    std::vector<Lmi> lmis;
    RVector interior;  // strictly feasible point (required when lmis is non-empty)
    RVector box;       // certified |t_i| <= box_i, empty when unknown

    static ParamSet from_polytope(const Polytope& p);
};

enum class OpnormMethod { Auto, Subgradient };

struct OpnormOptions {
    OpnormMethod method = OpnormMethod::Auto;
    double gap_tol = 1e-8;
    int max_iterations = 20000;  // subgradient cap
};

struct OpnormResult {
    CertifiedValue value;
    RVector argmin;
};

// Exact LP when every block reduces to a real-affine scalar; otherwise a barrier
// solve with a dual certificate. Subgradient is available for polytopes.
OpnormResult min_opnorm(const AffineFamily& f, const ParamSet& feasible, const OpnormOptions& opt = {});
OpnormResult min_opnorm_affine(const AffineFamily& f, const Polytope& feasible, const OpnormOptions& opt = {});

// Chebyshev centre of a polytope (strict interior point when one exists).
RVector polytope_interior_point(const RMatrix& a, const RVector& b);

}  // namespace qgp
