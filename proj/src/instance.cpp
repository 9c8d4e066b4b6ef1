#include "qgp/instance.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qgp/instance_json.hpp"

namespace qgp {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::Input, "instance: " + what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) bad(where + ": missing \"" + key + "\"");
    return j.at(key);
}

Complex complex_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    bad("complex numbers are [re, im] pairs, got " + j.dump());
}

std::vector<int> int_list(const Json& j, const std::string& where) {
    if (!j.is_array()) bad(where + ": expected a list of integers");
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) bad(where + ": expected a list of integers");
        out.push_back(v.get<int>());
    }
    return out;
}

RMatrix real_matrix(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) bad(where + ": expected a non-empty list of rows");
    RMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != j[0].size()) bad(where + ": ragged rows");
        for (size_t c = 0; c < j[r].size(); ++c) {
            if (!j[r][c].is_number()) bad(where + ": entries must be numbers");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

Json real_matrix_json(const RMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

std::vector<CMatrix> blocks_from_json(const Algebra& a, const Json& j, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != a.block_count())
        bad(where + ": expected " + std::to_string(a.block_count()) + " blocks");
    std::vector<CMatrix> out;
    for (int i = 0; i < a.block_count(); ++i) {
        CMatrix m = matrix_from_json(j[static_cast<size_t>(i)]);
        if (m.rows() != a.dim(i) || m.cols() != a.dim(i))
            bad(where + ": block " + std::to_string(i) + " must be " + std::to_string(a.dim(i)) + "x" + std::to_string(a.dim(i)));
        out.push_back(std::move(m));
    }
    return out;
}

Json lipnorm_to_json(const LipNorm& l) {
    Json j;
    switch (l.kind()) {
        case LipKind::ErgodicAction: {
            j["kind"] = "ergodic_action";
            Json els = Json::array();
            for (const auto& g : l.elements()) {
                Json e;
                e["perm"] = g.perm;
                Json us = Json::array();
                for (const auto& u : g.unitaries) us.push_back(matrix_to_json(u));
                e["unitaries"] = us;
                e["length"] = g.length;
                if (!g.label.empty()) e["label"] = g.label;
                els.push_back(e);
            }
            j["elements"] = els;
            return j;
        }
        case LipKind::PolytopeCustom:
            j["kind"] = "polytope_custom";
            j["functionals"] = real_matrix_json(l.functionals());
            return j;
        default: fail(ErrorKind::Unsupported, "instance: this Lip-norm is written through its space kind");
    }
}

std::shared_ptr<const LipNorm> lipnorm_from_json(const Algebra& a, const Json& j, const std::string& where) {
    const std::string kind = field(j, "kind", where).get<std::string>();
    if (kind == "polytope_custom")
        return std::make_shared<const LipNorm>(LipNorm::polytope_custom(a, real_matrix(field(j, "functionals", where), where)));
    if (kind == "ergodic_action") {
        std::vector<ActionElement> els;
        for (const auto& e : field(j, "elements", where)) {
            ActionElement g;
            g.perm = int_list(field(e, "perm", where), where + ".perm");
            for (const auto& u : field(e, "unitaries", where)) g.unitaries.push_back(matrix_from_json(u));
            g.length = field(e, "length", where).get<double>();
            if (e.contains("label")) g.label = e["label"].get<std::string>();
            els.push_back(std::move(g));
        }
        return std::make_shared<const LipNorm>(LipNorm::ergodic_action(a, std::move(els)));
    }
    bad(where + ": unknown lipnorm kind \"" + kind + "\"");
}

template <class T>
const T& find_named(const std::vector<T>& v, const std::string& name, const char* what) {
    for (const auto& x : v)
        if (x.name == name) return x;
    bad(std::string("unknown ") + what + " \"" + name + "\"");
}

}  // namespace

Json matrix_to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(row);
    }
    return rows;
}

CMatrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) bad("matrices are non-empty lists of rows");
    const size_t cols = j[0].size();
    CMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) bad("ragged matrix rows");
        for (size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
    }
    return m;
}

Json element_to_json(const Element& x) {
    Json out = Json::array();
    for (const auto& b : x.blocks()) out.push_back(matrix_to_json(b));
    return out;
}

Element element_from_json(const Algebra& a, const Json& j) { return Element(a, blocks_from_json(a, j, "element")); }

Json morphism_to_json(const Morphism& m) {
    Json j;
    j["multiplicities"] = m.multiplicities();
    Json us = Json::array();
    for (const auto& u : m.unitaries()) us.push_back(matrix_to_json(u));
    j["unitaries"] = us;
    return j;
}

Morphism morphism_from_json(const Algebra& source, const Algebra& target, const Json& j) {
    const Json& mj = field(j, "multiplicities", "morphism");
    std::vector<std::vector<int>> mult;
    for (const auto& row : mj) mult.push_back(int_list(row, "morphism.multiplicities"));
    if (!j.contains("unitaries")) return Morphism(source, target, std::move(mult));
    std::vector<CMatrix> us;
    for (const auto& u : j["unitaries"]) us.push_back(matrix_from_json(u));
    return Morphism(source, target, std::move(mult), std::move(us));
}

Json instance_to_json(const Instance& inst) {
    Json j;
    Json spaces = Json::object();
    for (const auto& s : inst.spaces) {
        Json e;
        if (s.torus) {
            e["kind"] = "fuzzy_torus";
            e["n"] = s.torus->n;
            e["k"] = s.torus->k;
            e["length"] = length_choice_name(s.torus->choice);
        } else if (s.sum) {
            e["kind"] = "direct_sum";
            e["A"] = s.sum->a;
            e["B"] = s.sum->b;
            e["bridge"] = s.sum->bridge;
            e["epsilon"] = s.sum->epsilon;
            e["denominator"] = s.lip->denom();
        } else if (s.lip->kind() == LipKind::FiniteLipschitz) {
            e["kind"] = "finite_metric";
            e["distances"] = real_matrix_json(s.lip->space().dist());
        } else {
            e["kind"] = "matrix_algebra";
            e["blocks"] = s.lip->parent().block_dims();
            e["lipnorm"] = lipnorm_to_json(*s.lip);
        }
        spaces[s.name] = e;
    }
    j["spaces"] = spaces;
    Json bridges = Json::object();
    for (const auto& b : inst.bridges) {
        Json e;
        e["A"] = b.from;
        e["B"] = b.to;
        e["D"] = b.bridge->d().block_dims();
        e["pivot"] = element_to_json(b.bridge->pivot());
        e["pi_A"] = morphism_to_json(b.bridge->pi_a());
        e["pi_B"] = morphism_to_json(b.bridge->pi_b());
        bridges[b.name] = e;
    }
    j["bridges"] = bridges;
    Json treks = Json::object();
    for (const auto& t : inst.treks) treks[t.name] = t.legs;
    j["treks"] = treks;
    Json states = Json::object();
    for (const auto& s : inst.states) {
        Json e;
        e["space"] = s.space;
        Json d = Json::array();
        for (const auto& b : s.state.density_blocks()) d.push_back(matrix_to_json(b));
        e["density"] = d;
        states[s.name] = e;
    }
    j["states"] = states;
    Json elements = Json::object();
    for (const auto& x : inst.elements) elements[x.name] = Json{{"space", x.space}, {"blocks", element_to_json(x.element)}};
    j["elements"] = elements;
    return j;
}

Instance instance_from_json(const Json& root) {
    const Json& j = root.contains("instance") ? root.at("instance") : root;
    if (!j.is_object()) bad("top level must be an object");
    for (const auto& [key, _] : j.items())
        if (key != "spaces" && key != "bridges" && key != "treks" && key != "states" && key != "elements")
            bad("unknown top-level key \"" + key + "\"");
    Instance inst;
    std::set<std::string> seen;
    auto unique = [&](const std::string& name) {
        if (!seen.insert(name).second) bad("duplicate name \"" + name + "\"");
    };

    // direct sums refer to bridges, so they are built after everything else
    std::vector<std::pair<std::string, Json>> sums;
    if (j.contains("spaces"))
        for (const auto& [name, e] : j["spaces"].items()) {
            unique(name);
            const std::string where = "space " + name;
            const std::string kind = field(e, "kind", where).get<std::string>();
            SpaceEntry s;
            s.name = name;
            if (kind == "finite_metric") {
                s.lip = std::make_shared<const LipNorm>(
                    LipNorm::finite_lipschitz(FiniteMetricSpace(real_matrix(field(e, "distances", where), where))));
            } else if (kind == "matrix_algebra") {
                const Algebra a(int_list(field(e, "blocks", where), where + ".blocks"));
                s.lip = lipnorm_from_json(a, field(e, "lipnorm", where), where);
            } else if (kind == "fuzzy_torus") {
                const LengthChoice c =
                    e.contains("length") ? parse_length_choice(e["length"].get<std::string>()) : LengthChoice::Arc;
                s.torus = fuzzy_torus(field(e, "n", where).get<int>(), field(e, "k", where).get<int>(), c);
                s.lip = s.torus->lip;
            } else if (kind == "direct_sum") {
                sums.emplace_back(name, e);
                continue;
            } else {
                bad(where + ": unknown kind \"" + kind + "\"");
            }
            inst.spaces.push_back(std::move(s));
        }

    if (j.contains("bridges"))
        for (const auto& [name, e] : j["bridges"].items()) {
            unique(name);
            const std::string where = "bridge " + name;
            BridgeEntry b;
            b.name = name;
            b.from = field(e, "A", where).get<std::string>();
            b.to = field(e, "B", where).get<std::string>();
            const Algebra d(int_list(field(e, "D", where), where + ".D"));
            const Algebra& aa = inst.space(b.from).lip->parent();
            const Algebra& ab = inst.space(b.to).lip->parent();
            b.bridge = std::make_shared<const Bridge>(d, Element(d, blocks_from_json(d, field(e, "pivot", where), where + ".pivot")),
                                                      morphism_from_json(aa, d, field(e, "pi_A", where)),
                                                      morphism_from_json(ab, d, field(e, "pi_B", where)));
            inst.bridges.push_back(std::move(b));
        }

    for (const auto& [name, e] : sums) {
        const std::string where = "space " + name;
        SpaceEntry s;
        s.name = name;
        SpaceEntry::SumOrigin o;
        o.a = field(e, "A", where).get<std::string>();
        o.b = field(e, "B", where).get<std::string>();
        o.bridge = field(e, "bridge", where).get<std::string>();
        o.epsilon = e.value("epsilon", 0.0);
        const BridgeEntry& g = inst.bridge(o.bridge);
        if (g.from != o.a || g.to != o.b) bad(where + ": bridge " + o.bridge + " does not join " + o.a + " and " + o.b);
        s.lip = std::make_shared<const LipNorm>(LipNorm::direct_sum_max(inst.space(o.a).lip, inst.space(o.b).lip, g.bridge,
                                                                        field(e, "denominator", where).get<double>()));
        s.sum = o;
        inst.spaces.push_back(std::move(s));
    }

    if (j.contains("treks"))
        for (const auto& [name, e] : j["treks"].items()) {
            unique(name);
            TrekEntry t;
            t.name = name;
            if (!e.is_array() || e.empty()) bad("trek " + name + ": expected a non-empty list of bridge names");
            for (const auto& leg : e) t.legs.push_back(leg.get<std::string>());
            inst.treks.push_back(std::move(t));
            inst.trek(name);  // resolves names and checks that the legs meet
        }

    if (j.contains("states"))
        for (const auto& [name, e] : j["states"].items()) {
            unique(name);
            const std::string where = "state " + name;
            NamedState s;
            s.name = name;
            s.space = field(e, "space", where).get<std::string>();
            const Algebra& a = inst.space(s.space).lip->parent();
            s.state = State(a, blocks_from_json(a, field(e, "density", where), where + ".density"));
            inst.states.push_back(std::move(s));
        }

    if (j.contains("elements"))
        for (const auto& [name, e] : j["elements"].items()) {
            unique(name);
            const std::string where = "element " + name;
            NamedElement x;
            x.name = name;
            x.space = field(e, "space", where).get<std::string>();
            const Algebra& a = inst.space(x.space).lip->parent();
            x.element = Element(a, blocks_from_json(a, field(e, "blocks", where), where + ".blocks"));
            inst.elements.push_back(std::move(x));
        }
    return inst;
}

const SpaceEntry& Instance::space(const std::string& name) const { return find_named(spaces, name, "space"); }
const BridgeEntry& Instance::bridge(const std::string& name) const { return find_named(bridges, name, "bridge"); }
const NamedState& Instance::state(const std::string& name) const { return find_named(states, name, "state"); }
const NamedElement& Instance::element(const std::string& name) const { return find_named(elements, name, "element"); }

bool Instance::has_space(const std::string& name) const {
    for (const auto& s : spaces)
        if (s.name == name) return true;
    return false;
}

Space Instance::as_space(const std::string& name) const { return Space{name, space(name).lip}; }

Trek Instance::trek(const std::string& name) const {
    const TrekEntry& t = find_named(treks, name, "trek");
    std::optional<Trek> out;
    for (const auto& leg : t.legs) {
        const bool back = !leg.empty() && leg[0] == '~';
        const BridgeEntry& b = bridge(back ? leg.substr(1) : leg);
        const std::string from = back ? b.to : b.from, to = back ? b.from : b.to;
        if (!out) out.emplace(as_space(from));
        if (out->end().name != from) bad("trek " + name + ": leg " + leg + " starts at " + from + ", not " + out->end().name);
        out->append(back ? std::make_shared<const Bridge>(inverse_bridge(*b.bridge)) : b.bridge, as_space(to));
    }
    return *out;
}

Registry Instance::registry(const MetricOptions& opt) const {
    Registry reg;
    for (const auto& s : spaces) reg.add_space(s.name, s.lip);
    for (const auto& b : bridges) reg.add_bridge(b.from, b.to, b.bridge, std::nullopt, opt);
    return reg;
}

Instance parse_instance(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
    try {
        return instance_from_json(j);
    } catch (const Json::exception& e) {
        bad(std::string("schema mismatch: ") + e.what());
    }
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

std::string dump_instance(const Instance& inst, int indent) { return instance_to_json(inst).dump(indent); }

const std::string& bundled_instance_text() {
    static const std::string text = R"({
  "spaces": {
    "twopoint": {"kind": "finite_metric", "distances": [[0, 1], [1, 0]]},
    "twopoint_wide": {"kind": "finite_metric", "distances": [[0, 2], [2, 0]]}
  },
  "bridges": {
    "identity": {
      "A": "twopoint", "B": "twopoint", "D": [1, 1],
      "pivot": [[[[1, 0]]], [[[1, 0]]]],
      "pi_A": {"multiplicities": [[1, 0], [0, 1]]},
      "pi_B": {"multiplicities": [[1, 0], [0, 1]]}
    },
    "classical": {
      "A": "twopoint", "B": "twopoint_wide", "D": [1, 1],
      "pivot": [[[[1, 0]]], [[[1, 0]]]],
      "pi_A": {"multiplicities": [[1, 0], [0, 1]]},
      "pi_B": {"multiplicities": [[1, 0], [0, 1]]}
    }
  },
  "treks": {
    "there_and_back": ["classical", "~classical"]
  },
  "states": {
    "dirac_p": {"space": "twopoint", "density": [[[[1, 0]]], [[[0, 0]]]]},
    "dirac_q": {"space": "twopoint", "density": [[[[0, 0]]], [[[1, 0]]]]}
  },
  "elements": {
    "f": {"space": "twopoint", "blocks": [[[[0, 0]]], [[[1, 0]]]]}
  }
}
)";
    return text;
}

}  // namespace qgp
