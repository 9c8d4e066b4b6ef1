#pragma once

#include <vector>

#include "qgp/algebra.hpp"

namespace qgp {

/** Orthonormal basis (columns) of V = ker(1 - w) ∩ ker(1 - w*) in each block. */
struct OneLevelSpace {
    std::vector<CMatrix> basis;

    int dimension() const;
    bool empty() const { return dimension() == 0; }
};

// States of D supported on V are exactly the 1-level states of w: for a state with
// density rho, rho((1-w)*(1-w)) = 0 forces supp(rho) into ker(1-w), and the
// Cauchy-Schwarz inequality then gives phi(d) = phi(wd) = phi(dw).
OneLevelSpace one_level_space(const Algebra& d, const Element& pivot);

/** (D, w, pi_A, pi_B) with injective legs and non-empty 1-level. */
class Bridge {
public:
    Bridge() = default;
    Bridge(Algebra d, Element pivot, Morphism pi_a, Morphism pi_b, bool require_selfadjoint = false);

    const Algebra& d() const { return d_; }
    const Element& pivot() const { return pivot_; }
    const Morphism& pi_a() const { return pi_a_; }
    const Morphism& pi_b() const { return pi_b_; }
    const Algebra& a() const { return pi_a_.source(); }
    const Algebra& b() const { return pi_b_.source(); }
    const OneLevelSpace& one_level() const { return level_; }
    bool selfadjoint_required() const { return selfadjoint_; }

private:
    Algebra d_;
    Element pivot_;
    Morphism pi_a_;
    Morphism pi_b_;
    OneLevelSpace level_;
    bool selfadjoint_ = false;
};

// || pi_A(a) w - w pi_B(b) ||_D
double bridge_seminorm(const Bridge& g, const Element& a, const Element& b);

// (D, w*, pi_B, pi_A)
Bridge inverse_bridge(const Bridge& g);

bool structurally_equal(const Bridge& x, const Bridge& y, double tol = 0.0);

// (A, 1, id, id)
Bridge identity_bridge(const Algebra& a);

}  // namespace qgp
