#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "qgp/bridge.hpp"
#include "qgp/lp.hpp"
#include "qgp/quantum_metric.hpp"

using namespace qgp;

namespace {

FiniteMetricSpace two_points(double d) {
    RMatrix m(2, 2);
    m << 0, d, d, 0;
    return FiniteMetricSpace(m);
}

// primal transport problem: min sum c_ij pi_ij over couplings of p and q
double transport(const FiniteMetricSpace& x, const RVector& p, const RVector& q) {
    const int n = x.size();
    LinearProgram lp = make_lp(n * n, false);
    lp.lower = RVector::Zero(n * n);
    lp.upper = RVector::Constant(n * n, kInf);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lp.objective(i * n + j) = x(i, j);
    for (int i = 0; i < n; ++i) {
        RVector r = RVector::Zero(n * n), c = RVector::Zero(n * n);
        for (int j = 0; j < n; ++j) {
            r(i * n + j) = 1;
            c(j * n + i) = 1;
        }
        lp.add_row(r, Sense::Equal, p(i));
        lp.add_row(c, Sense::Equal, q(i));
    }
    return solve_lp(lp).value;
}

// Pauli conjugations on M_2, each with length ell
LipNorm pauli_lipnorm(double lx, double ly, double lz) {
    const Complex i(0, 1);
    CMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -i, i, 0;
    z << 1, 0, 0, -1;
    return LipNorm::ergodic_action(Algebra({2}), {{{0}, {x}, lx, "X"}, {{0}, {y}, ly, "Y"}, {{0}, {z}, lz, "Z"}});
}

RVector probs(std::initializer_list<double> v) {
    RVector r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v) r(k++) = x;
    return r;
}

}  // namespace

TEST(MetricSpace, RejectsBrokenTriangle) {
    RMatrix m(3, 3);
    m << 0, 1, 5, 1, 0, 1, 5, 1, 0;
    EXPECT_THROW(FiniteMetricSpace{m}, Error);
}

TEST(EvalLipnorm, FiniteLipschitzExamples) {
    const LipNorm l = LipNorm::finite_lipschitz(two_points(1.0));
    EXPECT_DOUBLE_EQ(eval_lipnorm(l, Element::function(l.parent(), {0, 1})), 1.0);
    EXPECT_DOUBLE_EQ(eval_lipnorm(l, Element::scalar(l.parent(), 2.5)), 0.0);
    RMatrix d(3, 3);
    d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    const LipNorm l3 = LipNorm::finite_lipschitz(FiniteMetricSpace(d));
    const Element f = Element::function(l3.parent(), {0, 1, 2});
    double brute = 0.0;
    const double v[3] = {0, 1, 2};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) brute = std::max(brute, std::abs(v[i] - v[j]) / d(i, j));
    EXPECT_DOUBLE_EQ(eval_lipnorm(l3, f), brute);
    EXPECT_DOUBLE_EQ(brute, 1.0);
}

TEST(EvalLipnorm, RejectsNonSelfadjoint) {
    const LipNorm l = pauli_lipnorm(1, 1, 1);
    CMatrix m(2, 2);
    m << 0, 1, 0, 0;
    try {
        eval_lipnorm(l, Element(Algebra({2}), {m}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Domain);
    }
}

TEST(EvalLipnorm, SeminormAxiomsOnSamples) {
    Rng rng(41);
    const LipNorm l = pauli_lipnorm(1, 2, 1.5);
    for (int k = 0; k < 50; ++k) {
        const Element a = random_selfadjoint(l.parent(), rng), b = random_selfadjoint(l.parent(), rng);
        EXPECT_LE(eval_lipnorm(l, a + b), eval_lipnorm(l, a) + eval_lipnorm(l, b) + 1e-10);
        EXPECT_NEAR(eval_lipnorm(l, -2.5 * a), 2.5 * eval_lipnorm(l, a), 1e-10);
    }
}

TEST(CheckLipnorm, KernelPassAndFail) {
    Rng rng(2);
    for (int n = 1; n <= 5; ++n) EXPECT_TRUE(check_lipnorm(LipNorm::finite_lipschitz(random_metric_space(n, rng))).kernel_pass);
    const LipNorm trivial = LipNorm::ergodic_action(Algebra({2}), {{{0}, {CMatrix::Identity(2, 2)}, 1.0, "e"}});
    const LipnormCheck c = check_lipnorm(trivial);
    EXPECT_FALSE(c.kernel_pass);
    EXPECT_EQ(c.kernel_dim, 4);
    EXPECT_FALSE(c.report.passed);
    EXPECT_TRUE(check_lipnorm(pauli_lipnorm(1, 1, 1)).kernel_pass);
}

TEST(Slice, TwoPointsOnePointAndHexagon) {
    const LipNorm l = LipNorm::finite_lipschitz(two_points(1.0));
    const VertexSet v = lip_ball_slice(l, State::dirac(l.parent(), 0));
    ASSERT_EQ(v.sa.size(), 2u);
    EXPECT_LT((v.sa[0] - probs({0, -1})).norm(), 1e-9);
    EXPECT_LT((v.sa[1] - probs({0, 1})).norm(), 1e-9);

    const LipNorm one = LipNorm::finite_lipschitz(FiniteMetricSpace(RMatrix::Zero(1, 1)));
    const VertexSet w = lip_ball_slice(one, State::dirac(one.parent(), 0));
    ASSERT_EQ(w.sa.size(), 1u);
    EXPECT_EQ(w.sa[0].norm(), 0.0);

    RMatrix d = RMatrix::Ones(3, 3) - RMatrix::Identity(3, 3);
    const LipNorm tri = LipNorm::finite_lipschitz(FiniteMetricSpace(d));
    const VertexSet h = lip_ball_slice(tri, State::dirac(tri.parent(), 0));
    ASSERT_EQ(h.sa.size(), 6u);
    // hexagon {|f2| <= 1, |f3| <= 1, |f2 - f3| <= 1} listed by brute force over facet pairs
    std::vector<RVector> oracle;
    const double cand[6][3] = {{0, 1, 1}, {0, 1, 0}, {0, 0, 1}, {0, -1, -1}, {0, -1, 0}, {0, 0, -1}};
    for (const auto& c : cand) oracle.push_back(probs({c[0], c[1], c[2]}));
    for (const auto& x : h.sa) {
        EXPECT_EQ(x(0), 0.0);
        bool found = false;
        for (const auto& o : oracle) found = found || (x - o).norm() < 1e-9;
        EXPECT_TRUE(found);
    }
}

TEST(Slice, UnsupportedAndResource) {
    try {
        lip_ball_slice(pauli_lipnorm(1, 1, 1), State::tracial(Algebra({2})));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
    }
    Rng rng(1);
    const LipNorm big = LipNorm::finite_lipschitz(random_metric_space(9, rng));
    try {
        lip_ball_slice(big, State::dirac(big.parent(), 0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Resource);
    }
}

TEST(Mk, TwoPointExamples) {
    const LipNorm l = LipNorm::finite_lipschitz(two_points(1.0));
    const Algebra& a = l.parent();
    EXPECT_NEAR(mk_distance(l, State::dirac(a, 0), State::dirac(a, 0)).value, 0.0, 1e-12);
    const CertifiedValue pq = mk_distance(l, State::dirac(a, 0), State::dirac(a, 1));
    EXPECT_NEAR(pq.value, 1.0, 1e-12);
    EXPECT_EQ(pq.method, Method::ExactLp);
    const CertifiedValue half = mk_distance(l, State::probabilities(a, {0.5, 0.5}), State::dirac(a, 0));
    EXPECT_NEAR(half.value, 0.5, 1e-12);
    // couplings of (1/2,1/2) and delta_0 form one point; the grid below scans a superset
    double best = kInf;
    for (int k = 0; k <= 1000; ++k) {
        const double t = k / 1000.0;  // mass moved 0 -> 0
        const double p00 = t, p10 = 1 - t;
        if (std::abs(p00 - 0.5) < 1e-12 && std::abs(p10 - 0.5) < 1e-12) best = std::min(best, p10 * 1.0);
    }
    EXPECT_NEAR(half.value, best, 1e-12);
}

TEST(Mk, KantorovichRubinsteinOnRandomSpaces) {
    Rng rng(kDefaultSeed);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + trial % 4;
        const FiniteMetricSpace x = random_metric_space(n, rng);
        const LipNorm l = LipNorm::finite_lipschitz(x);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                EXPECT_NEAR(mk_distance(l, State::dirac(l.parent(), i), State::dirac(l.parent(), j)).value, x(i, j), 1e-7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        RVector p(n), q(n);
        for (int i = 0; i < n; ++i) {
            p(i) = u(rng);
            q(i) = u(rng);
        }
        p /= p.sum();
        q /= q.sum();
        const std::vector<double> pv(p.data(), p.data() + n), qv(q.data(), q.data() + n);
        const double mk = mk_distance(l, State::probabilities(l.parent(), pv), State::probabilities(l.parent(), qv)).value;
        EXPECT_NEAR(mk, transport(x, p, q), 1e-9);
    }
}

TEST(Mk, MetricAxiomsPolytopal) {
    Rng rng(8);
    const LipNorm l = LipNorm::finite_lipschitz(random_metric_space(4, rng));
    for (int k = 0; k < 10; ++k) {
        const State a = random_state(l.parent(), rng), b = random_state(l.parent(), rng), c = random_state(l.parent(), rng);
        const double ab = mk_distance(l, a, b).value, ba = mk_distance(l, b, a).value;
        EXPECT_EQ(ab, ba);
        EXPECT_LE(mk_distance(l, a, c).value, ab + mk_distance(l, b, c).value + 1e-7);
    }
}

TEST(Mk, PauliActionAgainstGrid) {
    // a = t + v.sigma, ||alpha_X(a) - a|| = 2 sqrt(y^2 + z^2), etc.; phi(a) - psi(a) = (r_phi - r_psi).v
    const double lx = 1.0, ly = 2.0, lz = 1.5;
    const LipNorm l = pauli_lipnorm(lx, ly, lz);
    Rng rng(12);
    for (int k = 0; k < 3; ++k) {
        const State phi = random_state(l.parent(), rng), psi = random_state(l.parent(), rng);
        auto bloch = [](const State& s) {
            const CMatrix& r = s.density(0);
            return RVector((RVector(3) << 2 * r(0, 1).real(), -2 * r(0, 1).imag(), (r(0, 0) - r(1, 1)).real()).finished());
        };
        const RVector dr = bloch(phi) - bloch(psi);
        double grid = 0.0;
        const int g = 120;
        for (int i = -g; i <= g; ++i)
            for (int j = -g; j <= g; ++j)
                for (int m = -g; m <= g; ++m) {
                    const double x = 0.75 * i / g, y = 0.75 * j / g, z = 0.75 * m / g;
                    if (2 * std::hypot(y, z) <= lx && 2 * std::hypot(x, z) <= ly && 2 * std::hypot(x, y) <= lz)
                        grid = std::max(grid, dr(0) * x + dr(1) * y + dr(2) * z);
                }
        const CertifiedValue mk = mk_distance(l, phi, psi);
        EXPECT_EQ(mk.method, Method::Iterative);
        EXPECT_LE(mk.gap(), 1e-6);
        EXPECT_GE(mk.upper, grid - 1e-12);
        EXPECT_NEAR(mk.value, grid, 2e-2 * dr.norm());
    }
}

TEST(Diameter, FiniteLipschitzEqualsMaxDistance) {
    Rng rng(77);
    const LipNorm one = LipNorm::finite_lipschitz(FiniteMetricSpace(RMatrix::Zero(1, 1)));
    EXPECT_EQ(state_diameter(one).value, 0.0);
    EXPECT_NEAR(state_diameter(LipNorm::finite_lipschitz(two_points(2.0))).value, 2.0, 1e-12);
    for (int trial = 0; trial < 20; ++trial) {
        const FiniteMetricSpace x = random_metric_space(2 + trial % 5, rng);
        const CertifiedValue d = state_diameter(LipNorm::finite_lipschitz(x));
        EXPECT_NEAR(d.value, x.diameter(), 1e-7);
        EXPECT_LE(d.gap(), 1e-7);
    }
}

TEST(Diameter, PauliBracket) {
    const LipNorm l = pauli_lipnorm(1.0, 1.0, 1.0);
    EXPECT_TRUE(l.group_closed());
    const CertifiedValue d = state_diameter(l);
    // with equal lengths the Lip-ball in Bloch coordinates is |v| restricted by pairwise hypot <= 1/2;
    // spread of a = 2|v|, maximized at |x| = |y| = |z| = 1/(2 sqrt 2): spread = sqrt(3/2)
    EXPECT_NEAR(d.lower, std::sqrt(1.5), 1e-6);
    EXPECT_GE(d.upper, d.lower);
    EXPECT_LE(d.upper, 2.0 * 3.0 / 4.0 + 1e-12);
}

TEST(Leibniz, FiniteLipschitzAndPauliPass) {
    Rng rng(5);
    const Report r = check_leibniz(LipNorm::finite_lipschitz(random_metric_space(5, rng)), 200, kDefaultSeed);
    EXPECT_TRUE(r.passed);
    EXPECT_TRUE(check_leibniz(pauli_lipnorm(1, 2, 1.5), 200, kDefaultSeed).passed);
}

TEST(Leibniz, PolytopeCounterexampleReported) {
    // on C^3, L(a) = max(|a1 - a2|, 100 |a1 + a2 - 2 a3|): a = (1,-1,0) gives L(a o a) = 200 > 2 ||a|| L(a) = 4
    RMatrix f(2, 3);
    f << 1, -1, 0, 100, 100, -200;
    const LipNorm l = LipNorm::polytope_custom(Algebra::commutative(3), f);
    const Element a = Element::function(l.parent(), {1, -1, 0});
    EXPECT_DOUBLE_EQ(eval_lipnorm(l, a * a), 200.0);
    EXPECT_DOUBLE_EQ(2 * op_norm(a) * eval_lipnorm(l, a), 4.0);
    const Report r = check_leibniz(l, 50, kDefaultSeed);
    EXPECT_FALSE(r.passed);
    EXPECT_FALSE(r.failures.empty());
}

TEST(DirectSumMax, DominatesComponents) {
    Rng rng(9);
    auto la = std::make_shared<LipNorm>(LipNorm::finite_lipschitz(random_metric_space(3, rng)));
    auto g = std::make_shared<Bridge>(identity_bridge(la->parent()));
    const LipNorm l = LipNorm::direct_sum_max(la, la, g, 0.7);
    EXPECT_TRUE(l.kernel_pass());
    for (int k = 0; k < 20; ++k) {
        const Element x = random_selfadjoint(l.parent(), rng);
        std::vector<CMatrix> ba(x.blocks().begin(), x.blocks().begin() + 3), bb(x.blocks().begin() + 3, x.blocks().end());
        const Element a(la->parent(), ba), b(la->parent(), bb);
        EXPECT_GE(eval_lipnorm(l, x), std::max(eval_lipnorm(*la, a), eval_lipnorm(*la, b)));
    }
}

TEST(RadiusBound, HoldsOnRandomLipBallSamples) {
    Rng rng(31);
    const LipNorm l = pauli_lipnorm(1.0, 2.0, 1.5);
    const double r = centered_radius_bound(l);
    for (int k = 0; k < 200; ++k) {
        Element a = random_selfadjoint(l.parent(), rng);
        a = (1.0 / eval_lipnorm(l, a)) * a;
        // best scalar shift for a 2x2 Hermitian is the eigenvalue midpoint
        const HermitianEigen e = hermitian_eigen(a.block(0));
        EXPECT_LE(0.5 * (e.values(1) - e.values(0)), r + 1e-12);
    }
}
