#pragma once

#include "qgp/bridge.hpp"
#include "qgp/quantum_metric.hpp"

namespace qgp {

/** Best b with L_B(b) <= r for a fixed a, i.e. the minimization behind target sets. */
struct TargetResult {
    CertifiedValue value;  // inf_b bn(a, b)
    Element b;             // minimizer, bn(a, b) == value.value
};
TargetResult best_target(const Bridge& g, const LipNorm& lb, const Element& a, double r, const MetricOptions& opt = {});

// sup over Lip_1(A) of inf over Lip_1(B) of bn(a, b)
CertifiedValue directed_reach(const Bridge& g, const LipNorm& la, const LipNorm& lb, const MetricOptions& opt = {});
CertifiedValue reach(const Bridge& g, const LipNorm& la, const LipNorm& lb, const MetricOptions& opt = {});

// Hausdorff distance in mk_L between S(A) and the states pulled back through pi from the 1-level
CertifiedValue directed_height(const Morphism& pi, const OneLevelSpace& level, const LipNorm& l,
                               const MetricOptions& opt = {});
CertifiedValue height(const Bridge& g, const LipNorm& la, const LipNorm& lb, const MetricOptions& opt = {});

struct BridgeLength {
    CertifiedValue reach;
    CertifiedValue height;
    CertifiedValue length;
};
BridgeLength bridge_evaluate(const Bridge& g, const LipNorm& la, const LipNorm& lb, const MetricOptions& opt = {});
CertifiedValue bridge_length(const Bridge& g, const LipNorm& la, const LipNorm& lb, const MetricOptions& opt = {});

}  // namespace qgp
