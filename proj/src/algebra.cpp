#include "qgp/algebra.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace qgp {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void check_blocks(const Algebra& a, const std::vector<CMatrix>& blocks, const char* what) {
    require(static_cast<int>(blocks.size()) == a.block_count(), ErrorKind::Structural,
            std::string(what) + ": block count does not match parent algebra");
    for (int i = 0; i < a.block_count(); ++i) {
        const auto& b = blocks[static_cast<size_t>(i)];
        require(b.rows() == a.dim(i) && b.cols() == a.dim(i), ErrorKind::Structural,
                std::string(what) + ": block " + std::to_string(i) + " has wrong shape");
    }
}

void same_parent(const Element& x, const Element& y) {
    require(x.parent() == y.parent(), ErrorKind::Structural, "elements belong to different algebras");
}

}  // namespace

Algebra::Algebra(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
    require(!dims_.empty(), ErrorKind::Structural, "algebra needs at least one block");
    for (int d : dims_) require(d >= 1, ErrorKind::Structural, "block dimensions must be positive");
}

int Algebra::linear_dim() const {
    int s = 0;
    for (int d : dims_) s += d * d;
    return s;
}

int Algebra::rep_dim() const { return std::accumulate(dims_.begin(), dims_.end(), 0); }

bool Algebra::is_commutative() const {
    for (int d : dims_)
        if (d != 1) return false;
    return true;
}

int Algebra::sa_offset(int block) const {
    int off = 0;
    for (int i = 0; i < block; ++i) off += dims_[static_cast<size_t>(i)] * dims_[static_cast<size_t>(i)];
    return off;
}

Algebra direct_sum(const Algebra& a, const Algebra& b) {
    std::vector<int> d = a.block_dims();
    d.insert(d.end(), b.block_dims().begin(), b.block_dims().end());
    return Algebra(d);
}

// ---------------------------------------------------------------- Element

Element::Element(Algebra parent, std::vector<CMatrix> blocks) : parent_(std::move(parent)), blocks_(std::move(blocks)) {
    check_blocks(parent_, blocks_, "element");
}

Element Element::zero(const Algebra& a) {
    std::vector<CMatrix> b;
    for (int d : a.block_dims()) b.push_back(CMatrix::Zero(d, d));
    return Element(a, std::move(b));
}

Element Element::unit(const Algebra& a) { return scalar(a, 1.0); }

Element Element::scalar(const Algebra& a, Complex s) {
    std::vector<CMatrix> b;
    for (int d : a.block_dims()) b.push_back(s * CMatrix::Identity(d, d));
    return Element(a, std::move(b));
}

Element Element::function(const Algebra& a, const std::vector<double>& values) {
    require(a.is_commutative(), ErrorKind::Structural, "function elements need a commutative algebra");
    require(static_cast<int>(values.size()) == a.block_count(), ErrorKind::Structural,
            "function element: wrong number of values");
    std::vector<CMatrix> b;
    for (double v : values) b.push_back(CMatrix::Constant(1, 1, v));
    return Element(a, std::move(b));
}

Element Element::adjoint() const {
    Element r = *this;
    for (auto& b : r.blocks_) b.adjointInPlace();
    return r;
}

bool Element::is_selfadjoint(double tol) const {
    for (const auto& b : blocks_)
        if (!is_hermitian(b, tol)) return false;
    return true;
}

double Element::max_abs_entry() const {
    double m = 0.0;
    for (const auto& b : blocks_) m = std::max(m, qgp::max_abs_entry(b));
    return m;
}

CMatrix Element::to_block_diagonal() const {
    const int n = parent_.rep_dim();
    CMatrix m = CMatrix::Zero(n, n);
    int off = 0;
    for (const auto& b : blocks_) {
        m.block(off, off, b.rows(), b.cols()) = b;
        off += static_cast<int>(b.rows());
    }
    return m;
}

Element& Element::operator+=(const Element& o) {
    same_parent(*this, o);
    for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
    return *this;
}

Element& Element::operator-=(const Element& o) {
    same_parent(*this, o);
    for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
    return *this;
}

Element& Element::operator*=(Complex s) {
    for (auto& b : blocks_) b *= s;
    return *this;
}

Element operator+(Element x, const Element& y) { return x += y; }
Element operator-(Element x, const Element& y) { return x -= y; }
Element operator*(Complex s, Element x) { return x *= s; }
Element operator*(double s, Element x) { return x *= Complex(s, 0.0); }

Element operator*(const Element& x, const Element& y) {
    same_parent(x, y);
    std::vector<CMatrix> b;
    b.reserve(x.blocks().size());
    for (size_t i = 0; i < x.blocks().size(); ++i) b.push_back(x.blocks()[i] * y.blocks()[i]);
    return Element(x.parent(), std::move(b));
}

// ---------------------------------------------------------------- State

State::State(Algebra parent, std::vector<CMatrix> density_blocks)
    : parent_(std::move(parent)), rho_(std::move(density_blocks)) {
    check_blocks(parent_, rho_, "state");
    double tr = 0.0;
    for (const auto& r : rho_) {
        require(is_hermitian(r, 1e-10), ErrorKind::Domain, "state density block is not Hermitian");
        const HermitianEigen e = hermitian_eigen(r);
        require(e.values(0) >= -1e-10, ErrorKind::Domain, "state density block is not positive");
        tr += r.trace().real();
    }
    require(std::abs(tr - 1.0) <= 1e-10, ErrorKind::Domain, "state densities must have total trace one");
}

State State::dirac(const Algebra& a, int block) {
    require(block >= 0 && block < a.block_count(), ErrorKind::Structural, "dirac: block out of range");
    require(a.dim(block) == 1, ErrorKind::Structural, "dirac: block must be one-dimensional");
    std::vector<CMatrix> r;
    for (int i = 0; i < a.block_count(); ++i) r.push_back(CMatrix::Zero(a.dim(i), a.dim(i)));
    r[static_cast<size_t>(block)](0, 0) = 1.0;
    return State(a, std::move(r));
}

State State::probabilities(const Algebra& a, const std::vector<double>& p) {
    require(a.is_commutative(), ErrorKind::Structural, "probability vectors need a commutative algebra");
    require(static_cast<int>(p.size()) == a.block_count(), ErrorKind::Structural, "wrong probability vector length");
    std::vector<CMatrix> r;
    for (double x : p) r.push_back(CMatrix::Constant(1, 1, x));
    return State(a, std::move(r));
}

State State::vector_state(const Algebra& a, int block, const CVector& v) {
    require(block >= 0 && block < a.block_count(), ErrorKind::Structural, "vector state: block out of range");
    require(v.size() == a.dim(block), ErrorKind::Structural, "vector state: wrong vector length");
    const double nv = v.norm();
    require(nv > 0.0, ErrorKind::Domain, "vector state: zero vector");
    std::vector<CMatrix> r;
    for (int i = 0; i < a.block_count(); ++i) r.push_back(CMatrix::Zero(a.dim(i), a.dim(i)));
    const CVector u = v / nv;
    r[static_cast<size_t>(block)] = u * u.adjoint();
    return State(a, std::move(r));
}

State State::tracial(const Algebra& a) {
    std::vector<CMatrix> r;
    const double n = a.rep_dim();
    for (int d : a.block_dims()) r.push_back(CMatrix::Identity(d, d) / n);
    return State(a, std::move(r));
}

Complex State::operator()(const Element& x) const {
    require(x.parent() == parent_, ErrorKind::Structural, "state evaluated on an element of another algebra");
    Complex s = 0.0;
    for (size_t i = 0; i < rho_.size(); ++i) s += (rho_[i] * x.blocks()[i]).trace();
    return s;
}

// ---------------------------------------------------------------- Morphism

Morphism::Morphism(Algebra source, Algebra target, std::vector<std::vector<int>> multiplicities)
    : Morphism(source, target, multiplicities, [&] {
          std::vector<CMatrix> u;
          for (int d : target.block_dims()) u.push_back(CMatrix::Identity(d, d));
          return u;
      }()) {}

Morphism::Morphism(Algebra source, Algebra target, std::vector<std::vector<int>> multiplicities,
                   std::vector<CMatrix> block_unitaries)
    : source_(std::move(source)),
      target_(std::move(target)),
      mult_(std::move(multiplicities)),
      unitaries_(std::move(block_unitaries)) {
    require(static_cast<int>(mult_.size()) == target_.block_count(), ErrorKind::Structural,
            "morphism: multiplicity matrix needs one row per target block");
    require(static_cast<int>(unitaries_.size()) == target_.block_count(), ErrorKind::Structural,
            "morphism: one unitary per target block");
    for (int t = 0; t < target_.block_count(); ++t) {
        const auto& row = mult_[static_cast<size_t>(t)];
        require(static_cast<int>(row.size()) == source_.block_count(), ErrorKind::Structural,
                "morphism: multiplicity row needs one entry per source block");
        int total = 0;
        for (int s = 0; s < source_.block_count(); ++s) {
            require(row[static_cast<size_t>(s)] >= 0, ErrorKind::Structural, "morphism: negative multiplicity");
            total += row[static_cast<size_t>(s)] * source_.dim(s);
        }
        std::ostringstream msg;
        msg << "morphism: target block " << t << " has dimension " << target_.dim(t)
            << " but multiplicities fill " << total;
        require(total == target_.dim(t), ErrorKind::Structural, msg.str());
        const CMatrix& u = unitaries_[static_cast<size_t>(t)];
        require(u.rows() == target_.dim(t) && u.cols() == target_.dim(t), ErrorKind::Structural,
                "morphism: unitary has wrong shape");
        require(is_unitary(u, 1e-10), ErrorKind::Structural, "morphism: block matrix is not unitary");
    }
}

Morphism Morphism::identity(const Algebra& a) {
    std::vector<std::vector<int>> m(static_cast<size_t>(a.block_count()),
                                    std::vector<int>(static_cast<size_t>(a.block_count()), 0));
    for (int i = 0; i < a.block_count(); ++i) m[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
    return Morphism(a, a, m);
}

bool Morphism::is_injective() const {
    for (int s = 0; s < source_.block_count(); ++s) {
        int tot = 0;
        for (int t = 0; t < target_.block_count(); ++t) tot += multiplicity(t, s);
        if (tot < 1) return false;
    }
    return true;
}

Element Morphism::apply(const Element& x) const {
    require(x.parent() == source_, ErrorKind::Structural, "apply_morphism: element is not in the source algebra");
    std::vector<CMatrix> out;
    out.reserve(static_cast<size_t>(target_.block_count()));
    for (int t = 0; t < target_.block_count(); ++t) {
        const int dt = target_.dim(t);
        CMatrix m = CMatrix::Zero(dt, dt);
        int off = 0;
        for (int s = 0; s < source_.block_count(); ++s) {
            const int ds = source_.dim(s);
            for (int c = 0; c < multiplicity(t, s); ++c) {
                m.block(off, off, ds, ds) = x.block(s);
                off += ds;
            }
        }
        const CMatrix& u = unitaries_[static_cast<size_t>(t)];
        out.push_back(u * m * u.adjoint());
    }
    return Element(target_, std::move(out));
}

State Morphism::pull_back(const State& phi) const {
    require(phi.parent() == target_, ErrorKind::Structural, "pull_back_state: state is not on the target algebra");
    std::vector<CMatrix> rho;
    for (int d : source_.block_dims()) rho.push_back(CMatrix::Zero(d, d));
    for (int t = 0; t < target_.block_count(); ++t) {
        const CMatrix& u = unitaries_[static_cast<size_t>(t)];
        const CMatrix sigma = u.adjoint() * phi.density(t) * u;
        int off = 0;
        for (int s = 0; s < source_.block_count(); ++s) {
            const int ds = source_.dim(s);
            for (int c = 0; c < multiplicity(t, s); ++c) {
                rho[static_cast<size_t>(s)] += sigma.block(off, off, ds, ds);
                off += ds;
            }
        }
    }
    // symmetrize against round-off before the State invariants run
    for (auto& r : rho) r = 0.5 * (r + r.adjoint()).eval();
    return State(source_, std::move(rho));
}

bool structurally_equal(const Morphism& a, const Morphism& b, double tol) {
    if (a.source() != b.source() || a.target() != b.target()) return false;
    if (a.multiplicities() != b.multiplicities()) return false;
    for (size_t t = 0; t < a.unitaries().size(); ++t)
        if (max_abs_entry(a.unitaries()[t] - b.unitaries()[t]) > tol) return false;
    return true;
}

bool structurally_equal(const Element& a, const Element& b, double tol) {
    if (a.parent() != b.parent()) return false;
    for (size_t i = 0; i < a.blocks().size(); ++i)
        if (max_abs_entry(a.blocks()[i] - b.blocks()[i]) > tol) return false;
    return true;
}

// ---------------------------------------------------------------- primitives

double op_norm(const Element& x) {
    double m = 0.0;
    for (const auto& b : x.blocks()) m = std::max(m, spectral_norm(b));
    return m;
}

std::pair<Element, Element> jordan_lie(const Element& x, const Element& y) {
    same_parent(x, y);
    const Element xy = x * y;
    const Element yx = y * x;
    Element jordan = 0.5 * (xy + yx);
    Element lie = Complex(0.0, -0.5) * (xy - yx);  // (xy - yx) / (2i)
    return {std::move(jordan), std::move(lie)};
}

RVector sa_coords(const Element& x) {
    const Algebra& a = x.parent();
    RVector v(a.linear_dim());
    int k = 0;
    for (int b = 0; b < a.block_count(); ++b) {
        const CMatrix& m = x.block(b);
        const int d = a.dim(b);
        for (int i = 0; i < d; ++i) v(k++) = m(i, i).real();
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                // Hermitian part of the (i,j) entry
                const Complex h = 0.5 * (m(i, j) + std::conj(m(j, i)));
                v(k++) = kSqrt2 * h.real();
                v(k++) = kSqrt2 * h.imag();
            }
    }
    return v;
}

Element from_sa_coords(const Algebra& a, const RVector& v) {
    require(v.size() == a.linear_dim(), ErrorKind::Structural, "coordinate vector has wrong length");
    std::vector<CMatrix> blocks;
    int k = 0;
    for (int b = 0; b < a.block_count(); ++b) {
        const int d = a.dim(b);
        CMatrix m = CMatrix::Zero(d, d);
        for (int i = 0; i < d; ++i) m(i, i) = v(k++);
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                const Complex z(v(k), v(k + 1));
                k += 2;
                m(i, j) = z / kSqrt2;
                m(j, i) = std::conj(z) / kSqrt2;
            }
        blocks.push_back(std::move(m));
    }
    return Element(a, std::move(blocks));
}

Element sa_basis(const Algebra& a, int k) {
    RVector v = RVector::Zero(a.linear_dim());
    v(k) = 1.0;
    return from_sa_coords(a, v);
}

RVector state_functional(const State& phi) {
    // phi(B_k) = tr(rho B_k) is the k-th coordinate of rho itself
    return sa_coords(Element(phi.parent(), phi.density_blocks()));
}

RVector unit_coords(const Algebra& a) { return sa_coords(Element::unit(a)); }

// ---------------------------------------------------------------- sampling

Element random_element(const Algebra& a, Rng& rng, double scale) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<CMatrix> blocks;
    for (int d : a.block_dims()) {
        CMatrix m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double re = g(rng);
                const double im = g(rng);
                m(i, j) = scale * Complex(re, im);
            }
        blocks.push_back(std::move(m));
    }
    return Element(a, std::move(blocks));
}

Element random_selfadjoint(const Algebra& a, Rng& rng, double scale) {
    std::normal_distribution<double> g(0.0, 1.0);
    RVector v(a.linear_dim());
    for (int k = 0; k < v.size(); ++k) v(k) = scale * g(rng);
    return from_sa_coords(a, v);
}

CVector random_unit_vector(int dim, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVector v(dim);
    for (int i = 0; i < dim; ++i) {
        const double re = g(rng);
        const double im = g(rng);
        v(i) = Complex(re, im);
    }
    const double n = v.norm();
    if (n == 0.0) {
        v.setZero();
        v(0) = 1.0;
        return v;
    }
    return v / n;
}

State random_state(const Algebra& a, Rng& rng) {
    // weighted mixture of a random positive matrix per block
    Element g = random_element(a, rng);
    std::vector<CMatrix> rho;
    double tr = 0.0;
    for (const auto& b : g.blocks()) {
        CMatrix p = b * b.adjoint();
        tr += p.trace().real();
        rho.push_back(std::move(p));
    }
    for (auto& r : rho) r /= tr;
    return State(a, std::move(rho));
}

State random_pure_state(const Algebra& a, Rng& rng) {
    std::uniform_int_distribution<int> pick(0, a.block_count() - 1);
    const int b = pick(rng);
    return State::vector_state(a, b, random_unit_vector(a.dim(b), rng));
}

CMatrix random_unitary(int dim, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double re = g(rng);
            const double im = g(rng);
            z(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR();
    for (int j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        const double ad = std::abs(d);
        if (ad > 0.0) q.col(j) *= d / ad;
    }
    return q;
}

}  // namespace qgp
