#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qgp/algebra.hpp"
#include "qgp/certified.hpp"
#include "qgp/opnorm.hpp"
#include "qgp/polytope.hpp"
#include "qgp/report.hpp"

namespace qgp {

class Bridge;

/** Distance matrix on n points. */
class FiniteMetricSpace {
public:
    FiniteMetricSpace() = default;
    // validates symmetry, zero diagonal, positivity off the diagonal and the triangle inequality;
    // allow_zero admits pseudo-metrics (used for coupling checks)
    explicit FiniteMetricSpace(RMatrix dist, bool allow_zero = false);

    int size() const { return static_cast<int>(dist_.rows()); }
    const RMatrix& dist() const { return dist_; }
    double operator()(int i, int j) const { return dist_(i, j); }
    double diameter() const { return size() ? dist_.maxCoeff() : 0.0; }

private:
    RMatrix dist_;
};

// shortest-path closure of random edge weights in [lo, hi]
FiniteMetricSpace random_metric_space(int n, Rng& rng, double lo = 0.5, double hi = 2.0);

/** x -> U_i x_{perm[i]} U_i^* in each block i, with a length attached. */
struct ActionElement {
    std::vector<int> perm;
    std::vector<CMatrix> unitaries;
    double length = 1.0;
    std::string label;
};

Element act(const ActionElement& g, const Element& x);

/** ||sum_j x_j coeffs[j]|| <= scale * r on real coordinates x; empty coeffs[j] means zero. */
struct NormConstraint {
    std::vector<CMatrix> coeffs;
    double scale = 1.0;
    int rows() const;
    int cols() const;
    CMatrix eval(const RVector& x) const;
};

/** Lip-ball {L <= r} as a list of norm constraints on sa coordinates. */
struct BallRep {
    int dim = 0;
    std::vector<NormConstraint> cons;
};

enum class LipKind { FiniteLipschitz, ErgodicAction, DirectSumMax, PolytopeCustom };

const char* lip_kind_name(LipKind k);

class LipNorm {
public:
    static LipNorm finite_lipschitz(FiniteMetricSpace space);
    static LipNorm ergodic_action(Algebra a, std::vector<ActionElement> elements);
    static LipNorm direct_sum_max(std::shared_ptr<const LipNorm> la, std::shared_ptr<const LipNorm> lb,
                                  std::shared_ptr<const Bridge> bridge, double denom);
    // row k of functionals acts on sa coordinates; L(a) = max_k |functionals.row(k) . a|
    static LipNorm polytope_custom(Algebra a, RMatrix functionals);

    LipKind kind() const { return kind_; }
    const Algebra& parent() const { return parent_; }
    const FiniteMetricSpace& space() const { return space_; }
    const std::vector<ActionElement>& elements() const { return elements_; }
    bool group_closed() const { return group_closed_; }
    const std::shared_ptr<const LipNorm>& la() const { return la_; }
    const std::shared_ptr<const LipNorm>& lb() const { return lb_; }
    const std::shared_ptr<const Bridge>& bridge() const { return bridge_; }
    double denom() const { return denom_; }
    const RMatrix& functionals() const { return functionals_; }

    const BallRep& ball() const { return ball_; }
    // no genuinely matrix-valued constraint: the Lip-ball is a polyhedron
    bool polytopal() const { return polytopal_; }
    // dimension of {a in sa(A) : L(a) = 0}; the Lip-norm condition asks for 1 with 1 in it
    int kernel_dim() const { return kernel_dim_; }
    bool kernel_pass() const { return kernel_pass_; }

private:
    LipKind kind_ = LipKind::PolytopeCustom;
    Algebra parent_;
    FiniteMetricSpace space_;
    std::vector<ActionElement> elements_;
    bool group_closed_ = false;
    std::shared_ptr<const LipNorm> la_, lb_;
    std::shared_ptr<const Bridge> bridge_;
    double denom_ = 1.0;
    RMatrix functionals_;
    BallRep ball_;
    bool polytopal_ = true;
    int kernel_dim_ = 0;
    bool kernel_pass_ = false;

    void finish();
};

struct MetricOptions {
    int vertex_limit = kDefaultVertexDimLimit;
    int pure_samples = 256;
    int ascent_starts = 8;
    int ascent_steps = 12;
    std::uint64_t seed = kDefaultSeed;
    double gap_tol = 1e-8;
    int threads = 1;
};

double eval_lipnorm(const LipNorm& l, const Element& a);

// stacked real linear map whose null space is the kernel of L on sa(A)
RMatrix kernel_matrix(const LipNorm& l);

struct LipnormCheck {
    Report report;
    bool kernel_pass = false;
    int kernel_dim = 0;
    CertifiedValue slice_radius;  // sup ||a|| over {L <= 1, tracial(a) = 0}
};
LipnormCheck check_lipnorm(const LipNorm& l, const MetricOptions& opt = {});

Report check_leibniz(const LipNorm& l, int samples, std::uint64_t seed, const MetricOptions& opt = {});

/** Orthonormal basis Q of ker(phi) in sa coordinates and the Lip-ball constraints in y where a = Q y. */
struct Slice {
    RMatrix basis;
    ParamSet set;
};
// {L <= r, phi(a) = 0}; the rows/LMIs of `set` are in slice coordinates, interior at y = 0
Slice lip_ball_slice_set(const LipNorm& l, const State& basepoint, double r = 1.0);
// constraints {L <= r} on full coordinates x = P z (P may select a sub-block of coordinates)
ParamSet ball_param_set(const BallRep& ball, const RMatrix& p, double r = 1.0);

/** Result of maximizing a linear functional c . y over a Lip-ball slice. */
struct SliceMax {
    RVector y;           // strictly feasible maximizer (slice coordinates)
    double upper = 0.0;  // certified bound on the maximum
    bool exact = false;
    bool certified = true;
    int iterations = 0;
};
SliceMax maximize_on_slice(const LipNorm& l, const Slice& s, const RVector& c, const MetricOptions& opt = {});

struct VertexSet {
    RMatrix basis;
    std::vector<RVector> coords;     // slice coordinates
    std::vector<RVector> sa;         // full sa coordinates
    std::vector<Element> elements;
};
VertexSet lip_ball_slice(const LipNorm& l, const State& basepoint, int dim_limit = kDefaultVertexDimLimit);

struct MkResult {
    CertifiedValue value;
    Element witness;  // a with L(a) <= 1 and (phi - psi)(a) = value.lower
};
MkResult mk_distance_witness(const LipNorm& l, const State& phi, const State& psi, const MetricOptions& opt = {});
CertifiedValue mk_distance(const LipNorm& l, const State& phi, const State& psi, const MetricOptions& opt = {});

CertifiedValue state_diameter(const LipNorm& l, const MetricOptions& opt = {});

// certified R with: every a, L(a) <= 1, is within R of a real multiple of 1
double centered_radius_bound(const LipNorm& l);
// certified upper bound on the state-space diameter without solving mk problems
double diameter_upper_bound(const LipNorm& l);

}  // namespace qgp
