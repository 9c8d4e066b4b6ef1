#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "qgp/errors.hpp"
#include "qgp/linalg.hpp"

namespace qgp {

using Rng = std::mt19937_64;
inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/** Finite-dimensional C*-algebra M_{d_1} (+) ... (+) M_{d_k}. */
class Algebra {
public:
    Algebra() : dims_{1} {}
    explicit Algebra(std::vector<int> block_dims);

    static Algebra commutative(int points) { return Algebra(std::vector<int>(static_cast<size_t>(points), 1)); }

    const std::vector<int>& block_dims() const { return dims_; }
    int block_count() const { return static_cast<int>(dims_.size()); }
    int dim(int block) const { return dims_[static_cast<size_t>(block)]; }
    int linear_dim() const;  // sum d_i^2, also the real dimension of sa(A)
    int rep_dim() const;     // sum d_i
    bool is_commutative() const;
    // offset of block i inside the real self-adjoint coordinate vector
    int sa_offset(int block) const;

    bool operator==(const Algebra& o) const { return dims_ == o.dims_; }
    bool operator!=(const Algebra& o) const { return !(*this == o); }

private:
    std::vector<int> dims_;
};

Algebra direct_sum(const Algebra& a, const Algebra& b);

class Element {
public:
    Element() = default;
    Element(Algebra parent, std::vector<CMatrix> blocks);

    static Element zero(const Algebra& a);
    static Element unit(const Algebra& a);
    static Element scalar(const Algebra& a, Complex s);
    // commutative algebras only: one real value per block
    static Element function(const Algebra& a, const std::vector<double>& values);

    const Algebra& parent() const { return parent_; }
    const std::vector<CMatrix>& blocks() const { return blocks_; }
    const CMatrix& block(int i) const { return blocks_[static_cast<size_t>(i)]; }
    CMatrix& block(int i) { return blocks_[static_cast<size_t>(i)]; }

    Element adjoint() const;
    bool is_selfadjoint(double tol = 1e-12) const;
    double max_abs_entry() const;
    // block-diagonal matrix of size rep_dim
    CMatrix to_block_diagonal() const;

    Element& operator+=(const Element& o);
    Element& operator-=(const Element& o);
    Element& operator*=(Complex s);

private:
    Algebra parent_;
    std::vector<CMatrix> blocks_;
};

Element operator+(Element x, const Element& y);
Element operator-(Element x, const Element& y);
Element operator*(const Element& x, const Element& y);
Element operator*(Complex s, Element x);
Element operator*(double s, Element x);

/** State given by density blocks rho_i with phi(x) = sum_i tr(rho_i x_i). */
class State {
public:
    State() = default;
    State(Algebra parent, std::vector<CMatrix> density_blocks);

    static State dirac(const Algebra& a, int block);  // block must have dimension 1
    static State probabilities(const Algebra& a, const std::vector<double>& p);
    static State vector_state(const Algebra& a, int block, const CVector& v);
    static State tracial(const Algebra& a);  // tr / rep_dim

    const Algebra& parent() const { return parent_; }
    const std::vector<CMatrix>& density_blocks() const { return rho_; }
    const CMatrix& density(int i) const { return rho_[static_cast<size_t>(i)]; }

    Complex operator()(const Element& x) const;

private:
    Algebra parent_;
    std::vector<CMatrix> rho_;
};

/**
 * Unital *-homomorphism in normal form. Target block t receives
 * U_t blockdiag(x_s repeated m[t][s] times, s ascending) U_t^*.
 */
class Morphism {
public:
    Morphism() = default;
    Morphism(Algebra source, Algebra target, std::vector<std::vector<int>> multiplicities,
             std::vector<CMatrix> block_unitaries);
    // unitaries default to identities
    Morphism(Algebra source, Algebra target, std::vector<std::vector<int>> multiplicities);

    static Morphism identity(const Algebra& a);

    const Algebra& source() const { return source_; }
    const Algebra& target() const { return target_; }
    const std::vector<std::vector<int>>& multiplicities() const { return mult_; }
    const std::vector<CMatrix>& unitaries() const { return unitaries_; }
    int multiplicity(int t, int s) const { return mult_[static_cast<size_t>(t)][static_cast<size_t>(s)]; }

    bool is_injective() const;

    Element apply(const Element& x) const;
    State pull_back(const State& phi) const;

private:
    Algebra source_;
    Algebra target_;
    std::vector<std::vector<int>> mult_;
    std::vector<CMatrix> unitaries_;
};

bool structurally_equal(const Morphism& a, const Morphism& b, double tol = 0.0);
bool structurally_equal(const Element& a, const Element& b, double tol = 0.0);

double op_norm(const Element& x);
std::pair<Element, Element> jordan_lie(const Element& x, const Element& y);
inline Element apply_morphism(const Morphism& m, const Element& x) { return m.apply(x); }
inline State pull_back_state(const Morphism& m, const State& phi) { return m.pull_back(phi); }

// Real coordinates on sa(A): per block the diagonal entries, then for i<j the
// pair (sqrt2 Re x_ij, sqrt2 Im x_ij). Orthonormal for <x,y> = tr(xy).
RVector sa_coords(const Element& x);
Element from_sa_coords(const Algebra& a, const RVector& v);
Element sa_basis(const Algebra& a, int k);
// f with phi(from_sa_coords(v)) = f . v
RVector state_functional(const State& phi);
RVector unit_coords(const Algebra& a);
// matrix of a real-linear map sa(A) -> sa(B) given on elements
template <class F>
RMatrix sa_linear_map(const Algebra& from, const Algebra& to, F&& f) {
    RMatrix m(to.linear_dim(), from.linear_dim());
    for (int k = 0; k < from.linear_dim(); ++k) m.col(k) = sa_coords(f(sa_basis(from, k)));
    return m;
}

Element random_selfadjoint(const Algebra& a, Rng& rng, double scale = 1.0);
Element random_element(const Algebra& a, Rng& rng, double scale = 1.0);
CVector random_unit_vector(int dim, Rng& rng);
State random_state(const Algebra& a, Rng& rng);
State random_pure_state(const Algebra& a, Rng& rng);
CMatrix random_unitary(int dim, Rng& rng);

}  // namespace qgp
