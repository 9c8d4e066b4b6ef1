#pragma once

#include <json.hpp>

#include "qgp/instance.hpp"

namespace qgp {

using Json = nlohmann::json;

// complex matrices are row-major lists of [re, im]; plain numbers are read as real
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);
Json element_to_json(const Element& x);
Element element_from_json(const Algebra& a, const Json& j);
Json morphism_to_json(const Morphism& m);
Morphism morphism_from_json(const Algebra& source, const Algebra& target, const Json& j);

Json instance_to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

}  // namespace qgp
