#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qgp/bridges.hpp"

namespace qgp {

/** A named quantum compact metric space; identity is the LipNorm pointer. */
struct Space {
    std::string name;
    std::shared_ptr<const LipNorm> lip;

    const Algebra& algebra() const { return lip->parent(); }
};

struct TrekLeg {
    Space from;
    std::shared_ptr<const Bridge> bridge;
    Space to;
    std::optional<CertifiedValue> length;  // cached bridge length, if already evaluated
};

class Trek {
public:
    Trek() = default;
    // empty trek sitting at `start`
    explicit Trek(Space start);

    void append(std::shared_ptr<const Bridge> bridge, Space to, std::optional<CertifiedValue> length = {});

    const Space& start() const { return start_; }
    const Space& end() const { return legs_.empty() ? start_ : legs_.back().to; }
    const std::vector<TrekLeg>& legs() const { return legs_; }
    size_t size() const { return legs_.size(); }

private:
    Space start_;
    std::vector<TrekLeg> legs_;
};

Trek compose(const Trek& first, const Trek& second);
// reversed legs with inverse bridges; cached lengths are dropped so they get re-evaluated
Trek invert(const Trek& t);
bool structurally_equal(const Trek& x, const Trek& y, double tol = 0.0);

std::vector<CertifiedValue> leg_lengths(const Trek& t, const MetricOptions& opt = {});
CertifiedValue trek_length(const Trek& t, const MetricOptions& opt = {});

using Itinerary = std::vector<Element>;

struct RegistryEdge {
    std::string from, to;
    std::shared_ptr<const Bridge> bridge;
    CertifiedValue length;
};

/** Named spaces and bridges between them; edges are walkable both ways through inverse bridges. */
class Registry {
public:
    void add_space(const std::string& name, std::shared_ptr<const LipNorm> lip);
    // evaluates the bridge length unless one is supplied
    void add_bridge(const std::string& from, const std::string& to, std::shared_ptr<const Bridge> bridge,
                    std::optional<CertifiedValue> length = {}, const MetricOptions& opt = {});

    bool has_space(const std::string& name) const { return spaces_.count(name) > 0; }
    Space space(const std::string& name) const;
    std::vector<std::string> space_names() const;
    const std::vector<RegistryEdge>& edges() const { return edges_; }

private:
    std::map<std::string, std::shared_ptr<const LipNorm>> spaces_;
    std::vector<RegistryEdge> edges_;
};

struct PropinquityBound {
    CertifiedValue value;  // length of the witness trek; the propinquity is at most value.upper
    Trek trek;
    std::vector<std::string> path;
};
// shortest trek by edge upper bounds, ties broken by lexicographic node order
PropinquityBound propinquity_upper_bound(const Registry& reg, const std::string& a, const std::string& b);

// b in the target set {L_B(b) <= r, bn(a, b) <= r * rho}; rho defaults to the certified reach upper bound
bool target_set_membership(const Bridge& g, const LipNorm& la, const LipNorm& lb, const Element& a, double r,
                           const Element& b, std::optional<double> rho = {}, const MetricOptions& opt = {});

// greedy r-itinerary: each step takes the minimizer of bn(eta_j, .) over {L_{j+1} <= r}
Itinerary greedy_itinerary(const Trek& t, const Element& a, double r, const MetricOptions& opt = {});

struct TargetCheckOptions {
    int samples = 20;
    std::uint64_t seed = kDefaultSeed;
    double tol_exact = 1e-6;
    double tol_iterative = 1e-3;
    MetricOptions metric;
};
// samples (a, a', r) and checks the norm, distance, diameter, linearity and Jordan/Lie product bounds
Report verify_target_bounds(const Trek& t, const TargetCheckOptions& opt = {});

}  // namespace qgp
