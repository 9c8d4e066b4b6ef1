#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qgp/bridges.hpp"

namespace qgp {

/** A (pseudo-)metric on X ⊔ Y given by d_X, d_Y and the cross distances. */
struct CouplingMetric {
    FiniteMetricSpace x, y;
    RMatrix cross;  // |X| x |Y|

    // validates the assembled (|X|+|Y|)-point matrix; zero cross distances are allowed
    void validate() const;
    FiniteMetricSpace assembled() const;
    // Hausdorff distance between X and Y inside the coupling
    double hausdorff() const;
};

struct ClassicalBridge {
    std::shared_ptr<const Bridge> bridge;
    std::shared_ptr<const LipNorm> lx, ly;
    double delta = 0.0;
    double epsilon = 0.0;
    std::vector<std::pair<int, int>> pairs;  // Z, one D-block per pair
};
// Z = {(x, y) : cross(x, y) <= delta + 2 eps}, D = C(Z), pivot 1, legs pull back along the projections.
// eps < 0 selects the default 1e-3 * (delta + max diameter).
ClassicalBridge classical_bridge(const CouplingMetric& c, double eps = -1.0);

// D = A ⊗ B blockwise, pivot 1, pi_A(a) = a ⊗ 1, pi_B(b) = 1 ⊗ b
Bridge diameter_bridge(const Algebra& a, const Algebra& b);

struct SumLipNorm {
    std::shared_ptr<const LipNorm> lip;
    CertifiedValue length;  // bridge length whose upper bound enters the denominator
    double epsilon = 0.0;
};
// L_eps(a, b) = max{L_A(a), L_B(b), bn(a, b) / (length + eps)}
SumLipNorm admissible_sum_lipnorm(std::shared_ptr<const Bridge> g, std::shared_ptr<const LipNorm> la,
                                  std::shared_ptr<const LipNorm> lb, double eps, const MetricOptions& opt = {});
SumLipNorm admissible_sum_lipnorm(std::shared_ptr<const Bridge> g, std::shared_ptr<const LipNorm> la,
                                  std::shared_ptr<const LipNorm> lb, double eps, const CertifiedValue& length);

Element pair_element(const Algebra& sum, const Element& a, const Element& b);

// Hausdorff distance in mk(L) between the two summands' state spaces of a direct-sum Lip-norm
CertifiedValue summand_hausdorff(const LipNorm& sum, const MetricOptions& opt = {});

Report verify_admissibility(const SumLipNorm& s, int samples, std::uint64_t seed, const MetricOptions& opt = {});

enum class LengthChoice { Arc, Chord };
const char* length_choice_name(LengthChoice c);
LengthChoice parse_length_choice(const std::string& s);

/** C*(Z_n x Z_n, sigma_k) in block form, with its dual action. */
struct FuzzyTorus {
    int n = 1;
    int k = 0;
    LengthChoice choice = LengthChoice::Arc;
    Algebra algebra;
    Element u, v;  // clock and shift: v u = exp(2 pi i k / n) u v
    std::shared_ptr<const LipNorm> lip;
};
FuzzyTorus fuzzy_torus(int n, int k, LengthChoice choice = LengthChoice::Arc);

struct GhResult {
    double value = 0.0;  // half the minimal distortion
    std::vector<std::pair<int, int>> correspondence;
    CouplingMetric coupling;
};
GhResult gh_bruteforce(const FiniteMetricSpace& x, const FiniteMetricSpace& y, int size_limit = 5, int threads = 1);

}  // namespace qgp
