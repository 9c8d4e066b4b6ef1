#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qgp/constructions.hpp"
#include "qgp/treks.hpp"

namespace qgp {

/** A named space with what is needed to write it back out. */
struct SpaceEntry {
    std::string name;
    std::shared_ptr<const LipNorm> lip;
    // set when the space was built from torus parameters
    std::optional<FuzzyTorus> torus;
    // direct sums keep the names they were assembled from
    struct SumOrigin {
        std::string a, b, bridge;
        double epsilon = 0.0;
    };
    std::optional<SumOrigin> sum;
};

struct BridgeEntry {
    std::string name, from, to;
    std::shared_ptr<const Bridge> bridge;
};

// legs are bridge names; "~name" walks a bridge backwards through its inverse
struct TrekEntry {
    std::string name;
    std::vector<std::string> legs;
};

struct NamedState {
    std::string name, space;
    State state;
};

struct NamedElement {
    std::string name, space;
    Element element;
};

class Instance {
public:
    std::vector<SpaceEntry> spaces;
    std::vector<BridgeEntry> bridges;
    std::vector<TrekEntry> treks;
    std::vector<NamedState> states;
    std::vector<NamedElement> elements;

    const SpaceEntry& space(const std::string& name) const;
    const BridgeEntry& bridge(const std::string& name) const;
    const NamedState& state(const std::string& name) const;
    const NamedElement& element(const std::string& name) const;
    Space as_space(const std::string& name) const;
    Trek trek(const std::string& name) const;
    // every bridge becomes an edge; lengths are evaluated here
    Registry registry(const MetricOptions& opt = {}) const;

    bool has_space(const std::string& name) const;
};

// accepts an instance document or a report carrying one under "instance"
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);
std::string dump_instance(const Instance& inst, int indent = 2);

// two finite metric spaces at distances 1 and 2 with identity and classical bridges
const std::string& bundled_instance_text();

}  // namespace qgp
