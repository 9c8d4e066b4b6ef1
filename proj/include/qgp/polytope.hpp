#pragma once

#include <optional>
#include <vector>

#include "qgp/linalg.hpp"

namespace qgp {

inline constexpr int kDefaultVertexDimLimit = 7;

/** H-polytope {x : A x <= b} with a lazily computed vertex list. */
class Polytope {
public:
    Polytope() = default;
    Polytope(RMatrix a, RVector b);

    const RMatrix& a() const { return a_; }
    const RVector& b() const { return b_; }
    int dim() const { return static_cast<int>(a_.cols()); }
    bool contains(const RVector& x, double tol = 1e-9) const;

    const std::vector<RVector>& vertices(int dim_limit = kDefaultVertexDimLimit) const;

private:
    RMatrix a_;
    RVector b_;
    mutable std::optional<std::vector<RVector>> vertices_;
};

// Double description on the homogenized cone; vertices sorted lexicographically.
std::vector<RVector> enum_vertices(const Polytope& p, int dim_limit = kDefaultVertexDimLimit);

// Lexicographic order with a tolerance, used for canonical vertex ordering.
bool lex_less(const RVector& u, const RVector& v, double tol = 1e-9);

}  // namespace qgp
