#include "qgp/bridge.hpp"

namespace qgp {

int OneLevelSpace::dimension() const {
    int n = 0;
    for (const auto& b : basis) n += static_cast<int>(b.cols());
    return n;
}

OneLevelSpace one_level_space(const Algebra& d, const Element& pivot) {
    require(pivot.parent() == d, ErrorKind::Structural, "pivot does not belong to D");
    OneLevelSpace s;
    for (int i = 0; i < d.block_count(); ++i) {
        const int n = d.dim(i);
        const CMatrix one_minus = CMatrix::Identity(n, n) - pivot.block(i);
        CMatrix stacked(2 * n, n);
        stacked << one_minus, one_minus.adjoint();
        CMatrix v = complex_null_space(stacked, 1e-11);
        // keep only directions that meet the stated residual
        std::vector<Eigen::Index> keep;
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
            const CVector col = v.col(c);
            if ((pivot.block(i) * col - col).norm() <= 1e-10 && (pivot.block(i).adjoint() * col - col).norm() <= 1e-10)
                keep.push_back(c);
        }
        CMatrix out(n, static_cast<Eigen::Index>(keep.size()));
        for (size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = v.col(keep[k]);
        s.basis.push_back(std::move(out));
    }
    return s;
}

Bridge::Bridge(Algebra d, Element pivot, Morphism pi_a, Morphism pi_b, bool require_selfadjoint)
    : d_(std::move(d)), pivot_(std::move(pivot)), pi_a_(std::move(pi_a)), pi_b_(std::move(pi_b)),
      selfadjoint_(require_selfadjoint) {
    require(pivot_.parent() == d_, ErrorKind::Structural, "bridge: pivot does not belong to D");
    require(pi_a_.target() == d_ && pi_b_.target() == d_, ErrorKind::Structural, "bridge: legs must map into D");
    require(pi_a_.is_injective() && pi_b_.is_injective(), ErrorKind::Structural, "bridge: legs must be injective");
    if (selfadjoint_) require(pivot_.is_selfadjoint(), ErrorKind::Domain, "bridge: pivot is not self-adjoint");
    level_ = one_level_space(d_, pivot_);
    require(!level_.empty(), ErrorKind::Structural, "bridge: pivot has an empty 1-level");
}

double bridge_seminorm(const Bridge& g, const Element& a, const Element& b) {
    require(a.parent() == g.a() && b.parent() == g.b(), ErrorKind::Structural, "bridge seminorm: parent mismatch");
    return op_norm(g.pi_a().apply(a) * g.pivot() - g.pivot() * g.pi_b().apply(b));
}

Bridge inverse_bridge(const Bridge& g) {
    return Bridge(g.d(), g.pivot().adjoint(), g.pi_b(), g.pi_a(), g.selfadjoint_required());
}

bool structurally_equal(const Bridge& x, const Bridge& y, double tol) {
    return x.d() == y.d() && structurally_equal(x.pivot(), y.pivot(), tol) && structurally_equal(x.pi_a(), y.pi_a(), tol) &&
           structurally_equal(x.pi_b(), y.pi_b(), tol);
}

Bridge identity_bridge(const Algebra& a) {
    return Bridge(a, Element::unit(a), Morphism::identity(a), Morphism::identity(a));
}

}  // namespace qgp
