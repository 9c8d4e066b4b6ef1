#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qgp/bridges.hpp"

using namespace qgp;

namespace {

FiniteMetricSpace two_points(double d) {
    RMatrix m(2, 2);
    m << 0, d, d, 0;
    return FiniteMetricSpace(m);
}

LipNorm pauli_lipnorm() {
    const Complex i(0, 1);
    CMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -i, i, 0;
    z << 1, 0, 0, -1;
    return LipNorm::ergodic_action(Algebra({2}), {{{0}, {x}, 1.0, "X"}, {{0}, {y}, 1.0, "Y"}, {{0}, {z}, 1.0, "Z"}});
}

// A = C^2 -> M_3 (point 0 twice), B = C + M_2 -> M_3, pivot fixing e_0 with a random corner
Bridge random_bridge(Rng& rng) {
    const Algebra d({3});
    const Algebra a = Algebra::commutative(2);
    const Algebra b({1, 2});
    CMatrix w = CMatrix::Zero(3, 3);
    w(0, 0) = 1.0;
    w.bottomRightCorner(2, 2) = random_element(Algebra({2}), rng, 0.7).block(0);
    const CMatrix u = random_unitary(3, rng);
    const CMatrix fix = random_unitary(3, rng);
    // conjugate the pivot so that its fixed vector is not a coordinate vector
    const Element pivot(d, {fix * w * fix.adjoint()});
    return Bridge(d, pivot, Morphism(a, d, {{2, 1}}, {u}), Morphism(b, d, {{1, 1}}, {random_unitary(3, rng)}));
}

}  // namespace

TEST(OneLevel, Examples) {
    const Algebra m2({2});
    CMatrix w = CMatrix::Zero(2, 2);
    w(0, 0) = 1.0;
    const OneLevelSpace v = one_level_space(m2, Element(m2, {w}));
    ASSERT_EQ(v.dimension(), 1);
    EXPECT_NEAR(std::abs(v.basis[0](0, 0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(v.basis[0](1, 0)), 0.0, 1e-12);

    EXPECT_TRUE(one_level_space(m2, Element::scalar(m2, 0.5)).empty());
    EXPECT_EQ(one_level_space(Algebra({2, 3}), Element::unit(Algebra({2, 3}))).dimension(), 5);
    EXPECT_THROW(Bridge(m2, Element::scalar(m2, 0.5), Morphism::identity(m2), Morphism::identity(m2)), Error);
}

TEST(OneLevel, FixedVectorsOfNonNormalPivot) {
    // w = [[1, 1], [0, 1]] fixes e_0 but w* does not
    const Algebra m2({2});
    CMatrix w(2, 2);
    w << 1, 1, 0, 1;
    EXPECT_TRUE(one_level_space(m2, Element(m2, {w})).empty());
    Rng rng(5);
    for (int k = 0; k < 10; ++k) {
        const Bridge g = random_bridge(rng);
        ASSERT_EQ(g.one_level().dimension(), 1);
        const CVector v = g.one_level().basis[0].col(0);
        EXPECT_LE((g.pivot().block(0) * v - v).norm(), 1e-10);
        EXPECT_LE((g.pivot().block(0).adjoint() * v - v).norm(), 1e-10);
    }
}

TEST(BridgeSeminorm, Examples) {
    const Algebra a = Algebra::commutative(3);
    const Bridge id = identity_bridge(a);
    Rng rng(1);
    const Element x = random_selfadjoint(a, rng);
    EXPECT_EQ(bridge_seminorm(id, x, x), 0.0);
    EXPECT_NEAR(bridge_seminorm(id, x, Element::zero(a)), op_norm(x), 1e-15);
    for (int k = 0; k < 10; ++k) {
        const Bridge g = random_bridge(rng);
        const double bn = bridge_seminorm(g, Element::unit(g.a()), Element::zero(g.b()));
        EXPECT_NEAR(bn, op_norm(g.pivot()), 1e-12);
        EXPECT_GE(bn, 1.0 - 1e-12);
    }
    EXPECT_THROW(bridge_seminorm(id, Element::zero(Algebra::commutative(2)), x), Error);
}

TEST(BridgeSeminorm, LeibnizEstimateAndShift) {
    Rng rng(2);
    for (int k = 0; k < 200; ++k) {
        const Bridge g = random_bridge(rng);
        const Element a = random_selfadjoint(g.a(), rng), c = random_selfadjoint(g.a(), rng);
        const Element b = random_selfadjoint(g.b(), rng), d = random_selfadjoint(g.b(), rng);
        const double lhs = bridge_seminorm(g, a * c, b * d);
        const double rhs = op_norm(a) * bridge_seminorm(g, c, d) + bridge_seminorm(g, a, b) * op_norm(d);
        EXPECT_LE(lhs, rhs + 1e-9);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        const double t = u(rng);
        const double base = bridge_seminorm(g, a, b);
        const double shifted = bridge_seminorm(g, a + Element::scalar(g.a(), t), b + Element::scalar(g.b(), t));
        EXPECT_NEAR(shifted, base, 1e-12 * (1.0 + base + std::abs(t) * op_norm(g.pivot())));
    }
}

TEST(InverseBridge, Involution) {
    Rng rng(3);
    const Bridge g = random_bridge(rng);
    const Bridge inv = inverse_bridge(g);
    EXPECT_TRUE(structurally_equal(inverse_bridge(inv), g));
    EXPECT_EQ(inv.one_level().dimension(), g.one_level().dimension());
    const Element a = random_selfadjoint(g.a(), rng);
    const Element b = random_selfadjoint(g.b(), rng);
    EXPECT_NEAR(bridge_seminorm(inv, b, a), bridge_seminorm(g, a, b), 1e-12);
    const Bridge id = identity_bridge(Algebra({2}));
    EXPECT_TRUE(structurally_equal(inverse_bridge(id).pivot(), id.pivot()));
}

TEST(Reach, IdentityBridgeIsZero) {
    const Rng::result_type seed = 4;
    Rng rng(seed);
    const LipNorm l = LipNorm::finite_lipschitz(random_metric_space(4, rng));
    const Bridge g = identity_bridge(l.parent());
    const BridgeLength r = bridge_evaluate(g, l, l);
    EXPECT_NEAR(r.reach.upper, 0.0, 1e-9);
    EXPECT_EQ(r.height.upper, 0.0);
    EXPECT_NEAR(r.length.upper, 0.0, 1e-9);
    EXPECT_GE(r.length.lower, 0.0);
}

TEST(Reach, ScaledTwoPointAgainstGrid) {
    // L_B = L_A / 2 on C^2: Lip_1(B) has twice the spread of Lip_1(A)
    const LipNorm la = LipNorm::finite_lipschitz(two_points(1.0));
    const LipNorm lb = LipNorm::polytope_custom(Algebra::commutative(2), (RMatrix(1, 2) << 0.5, -0.5).finished());
    const Bridge g = identity_bridge(Algebra::commutative(2));
    const CertifiedValue r = reach(g, la, lb);

    // grid oracle: pin one coordinate of the outer element by constant shift, scan the rest
    auto directed = [](double outer_spread, double inner_spread) {
        double sup = 0.0;
        const int n = 40;
        for (int i = 0; i <= n; ++i) {
            const double x = outer_spread * (2.0 * i / n - 1.0);
            double inf = kInf;
            for (int j = 0; j <= 4 * n; ++j) {
                const double y = inner_spread * (2.0 * j / (4 * n) - 1.0);
                // best shared constant for the pair (x, 0) vs (y + t, t): t centered between x - y and 0
                const double t = 0.5 * (x - y);
                inf = std::min(inf, std::max(std::abs(x - y - t), std::abs(t)));
            }
            sup = std::max(sup, inf);
        }
        return sup;
    };
    const double oracle = std::max(directed(1.0, 2.0), directed(2.0, 1.0));
    EXPECT_NEAR(oracle, 0.5, 1e-12);
    EXPECT_NEAR(r.value, oracle, 1e-7);
    EXPECT_LE(r.lower, oracle + 1e-9);
    EXPECT_GE(r.upper, oracle - 1e-9);
}

TEST(Reach, InverseSymmetry) {
    Rng rng(6);
    for (int k = 0; k < 3; ++k) {
        const Bridge g = random_bridge(rng);
        const LipNorm la = LipNorm::finite_lipschitz(random_metric_space(2, rng));
        const LipNorm lb = LipNorm::finite_lipschitz(random_metric_space(3, rng));
        const Bridge gb = Bridge(g.d(), g.pivot(), g.pi_a(), Morphism(Algebra::commutative(3), g.d(), {{1, 1, 1}},
                                                                     {random_unitary(3, rng)}));
        const CertifiedValue r1 = reach(gb, la, lb);
        const CertifiedValue r2 = reach(inverse_bridge(gb), lb, la);
        EXPECT_NEAR(r1.value, r2.value, 1e-7);
        const CertifiedValue l1 = bridge_length(gb, la, lb);
        const CertifiedValue l2 = bridge_length(inverse_bridge(gb), lb, la);
        EXPECT_NEAR(l1.value, l2.value, 1e-7);
        EXPECT_LE(l1.lower, l1.upper);
    }
}

TEST(Reach, TargetAttainment) {
    Rng rng(7);
    const Bridge g0 = random_bridge(rng);
    const Bridge g(g0.d(), g0.pivot(), g0.pi_a(),
                   Morphism(Algebra::commutative(3), g0.d(), {{1, 1, 1}}, {random_unitary(3, rng)}));
    const LipNorm lb = LipNorm::finite_lipschitz(random_metric_space(3, rng));
    for (int k = 0; k < 10; ++k) {
        const Element a = random_selfadjoint(g.a(), rng);
        for (double r : {0.0, 0.5, 2.0}) {
            const TargetResult t = best_target(g, lb, a, r);
            EXPECT_NEAR(bridge_seminorm(g, a, t.b), t.value.value, 1e-7);
            EXPECT_LE(eval_lipnorm(lb, t.b), r * (1.0 + 1e-9) + 1e-12);
            EXPECT_LE(t.value.lower, t.value.upper);
        }
        // a larger radius can only help
        EXPECT_LE(best_target(g, lb, a, 2.0).value.lower, best_target(g, lb, a, 0.5).value.upper + 1e-9);
    }
}

TEST(Reach, NonPolytopalIdentity) {
    const LipNorm l = pauli_lipnorm();
    const CertifiedValue r = reach(identity_bridge(l.parent()), l, l);
    EXPECT_EQ(r.method, Method::Iterative);
    EXPECT_LE(r.lower, 1e-6);
    EXPECT_GE(r.upper, r.lower);
}

TEST(Height, UnitPivotIsZero) {
    Rng rng(8);
    const Algebra d = Algebra::commutative(3);
    const Morphism pa = Morphism::identity(d);
    const Morphism pb(Algebra::commutative(2), d, {{1, 0}, {0, 1}, {0, 1}});
    const Bridge g(d, Element::unit(d), pa, pb);
    const LipNorm la = LipNorm::finite_lipschitz(random_metric_space(3, rng));
    const LipNorm lb = LipNorm::finite_lipschitz(random_metric_space(2, rng));
    const CertifiedValue h = height(g, la, lb);
    EXPECT_EQ(h.value, 0.0);
    EXPECT_EQ(h.upper, 0.0);
}

TEST(Height, PartialLevelAgainstDistance) {
    // w = diag(1, 0) on C^2: only the Dirac at point 0 survives, so the A-term is d(0, 1)
    const Algebra d = Algebra::commutative(2);
    const Morphism pb(Algebra(), d, {{1}, {1}});
    const Bridge g(d, Element::function(d, {1.0, 0.0}), Morphism::identity(d), pb);
    const LipNorm la = LipNorm::finite_lipschitz(two_points(1.75));
    const LipNorm lb = LipNorm::polytope_custom(Algebra(), RMatrix::Zero(1, 1));
    const CertifiedValue ha = directed_height(g.pi_a(), g.one_level(), la);
    EXPECT_NEAR(ha.value, 1.75, 1e-9);
    EXPECT_LE(ha.lower, 1.75 + 1e-9);
    EXPECT_GE(ha.upper, 1.75 - 1e-9);
    EXPECT_EQ(directed_height(g.pi_b(), g.one_level(), lb).value, 0.0);
}

TEST(Height, NoncommutativePartialLevel) {
    // pulled-back 1-level of diag(1, 0) on M_2 is the single pure state |0>
    const Algebra m2({2});
    CMatrix w = CMatrix::Zero(2, 2);
    w(0, 0) = 1.0;
    const Bridge g(m2, Element(m2, {w}), Morphism::identity(m2), Morphism::identity(m2));
    const LipNorm l = pauli_lipnorm();
    MetricOptions opt;
    opt.pure_samples = 32;
    const CertifiedValue h = directed_height(g.pi_a(), g.one_level(), l, opt);
    CVector e0 = CVector::Zero(2), e1 = CVector::Zero(2);
    e0(0) = 1.0;
    e1(1) = 1.0;
    const CertifiedValue antipode = mk_distance(l, State::vector_state(m2, 0, e0), State::vector_state(m2, 0, e1));
    EXPECT_EQ(h.method, Method::Iterative);
    // both sides are interior-point values, so agreement is at the barrier gap
    EXPECT_GE(h.lower, antipode.lower - 1e-5);
    EXPECT_LE(h.lower, h.upper);
}
