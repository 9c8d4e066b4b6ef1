#include "qgp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qgp/instance_json.hpp"

namespace qgp {

namespace {

struct Flags {
    std::string input, output;
    std::string format = "json";
    double tol_lp = 1e-9;
    double tol_iter = 1e-4;
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;
    int samples = 20;
    std::optional<double> epsilon;
    int n = 2, k = 1;
    std::string length = "arc";
};

struct Row {
    std::string name, quantity;
    CertifiedValue v;
};

/** Everything a command produced, rendered once at the end. */
struct Output {
    std::string command;
    std::vector<Row> rows;
    std::vector<Report> checks;
    Json extra = Json::object();
    std::optional<Instance> instance;
    bool raw_instance = false;  // `export` writes the bare instance document

    void add(std::string name, std::string quantity, CertifiedValue v) {
        rows.push_back(Row{std::move(name), std::move(quantity), std::move(v)});
    }
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string render(const Output& o, const Flags& f) {
    if (o.raw_instance) return dump_instance(*o.instance) + "\n";
    if (f.format == "csv") {
        std::string s = "name,quantity,value,lower,upper,method,seed\n";
        auto line = [&](const std::string& name, const std::string& q, double v, double lo, double hi, const char* m) {
            s += csv_field(name) + "," + csv_field(q) + "," + num(v) + "," + num(lo) + "," + num(hi) + "," + m + "," +
                 std::to_string(f.seed) + "\n";
        };
        for (const auto& r : o.rows) line(r.name, r.quantity, r.v.value, r.v.lower, r.v.upper, method_name(r.v.method));
        for (const auto& c : o.checks) {
            line(c.name, "passed", c.passed ? 1.0 : 0.0, c.passed ? 1.0 : 0.0, c.passed ? 1.0 : 0.0, "check");
            for (const auto& [key, v] : c.metrics) line(c.name, key, v, v, v, "check");
        }
        return s;
    }
    using OJson = nlohmann::ordered_json;
    const OJson tol = {{"lp", f.tol_lp}, {"iter", f.tol_iter}};
    OJson j;
    j["command"] = o.command;
    j["seed"] = f.seed;
    j["tolerances"] = tol;
    OJson rows = OJson::array();
    for (const auto& r : o.rows) {
        OJson e;
        e["name"] = r.name;
        e["quantity"] = r.quantity;
        e["value"] = r.v.value;
        e["lower"] = r.v.lower;
        e["upper"] = r.v.upper;
        e["method"] = method_name(r.v.method);
        e["iterations"] = r.v.iterations;
        e["tolerances"] = tol;
        e["seed"] = f.seed;
        if (!r.v.note.empty()) e["note"] = r.v.note;
        rows.push_back(e);
    }
    j["results"] = rows;
    if (!o.checks.empty()) {
        OJson checks = OJson::array();
        for (const auto& c : o.checks) {
            OJson e;
            e["name"] = c.name;
            e["passed"] = c.passed;
            e["failures"] = c.failures;
            OJson m = OJson::object();
            for (const auto& [key, v] : c.metrics) m[key] = v;
            e["metrics"] = m;
            if (!c.notes.empty()) e["notes"] = c.notes;
            checks.push_back(e);
        }
        j["checks"] = checks;
    }
    for (const auto& [key, v] : o.extra.items()) j[key] = OJson::parse(v.dump());
    if (o.instance) j["instance"] = OJson::parse(instance_to_json(*o.instance).dump());
    j["passed"] = o.passed();
    return j.dump(2) + "\n";
}

MetricOptions metric_options(const Flags& f) {
    MetricOptions m;
    m.seed = f.seed;
    m.threads = f.threads;
    return m;
}

void need(const std::vector<std::string>& args, size_t n, const std::string& usage) {
    if (args.size() != n) fail(ErrorKind::Input, "usage: qgp " + usage);
}

// copies a space into `out`, together with whatever a direct sum is assembled from
void copy_space(const Instance& in, const std::string& name, Instance& out) {
    if (out.has_space(name)) return;
    const SpaceEntry& s = in.space(name);
    if (s.sum) {
        copy_space(in, s.sum->a, out);
        copy_space(in, s.sum->b, out);
        bool have = false;
        for (const auto& b : out.bridges) have = have || b.name == s.sum->bridge;
        if (!have) out.bridges.push_back(in.bridge(s.sum->bridge));
    }
    out.spaces.push_back(s);
}

FiniteMetricSpace metric_of(const Instance& inst, const std::string& name) {
    const LipNorm& l = *inst.space(name).lip;
    require(l.kind() == LipKind::FiniteLipschitz, ErrorKind::Input, "space " + name + " is not a finite metric space");
    return l.space();
}

void add_length_rows(Output& o, const std::string& name, const BridgeLength& len) {
    o.add(name, "reach", len.reach);
    o.add(name, "height", len.height);
    o.add(name, "length", len.length);
}

SumLipNorm sum_of(const SpaceEntry& s) {
    SumLipNorm out;
    out.lip = s.lip;
    out.epsilon = s.sum->epsilon;
    out.length = CertifiedValue::exact(s.lip->denom() - s.sum->epsilon);
    return out;
}

Report named(Report r, const std::string& name) {
    r.name = name;
    return r;
}

void verify(const Instance& inst, const std::string& what, const std::vector<std::string>& names, const Flags& f,
            Output& o) {
    const MetricOptions m = metric_options(f);
    auto spaces = [&] {
        std::vector<std::string> out = names;
        if (out.empty())
            for (const auto& s : inst.spaces) out.push_back(s.name);
        return out;
    };
    const bool all = what == "all";
    if (all || what == "kernel")
        for (const auto& s : spaces()) {
            const LipnormCheck c = check_lipnorm(*inst.space(s).lip, m);
            Report r = named(c.report, "kernel:" + s);
            if (!c.kernel_pass) r.fail("kernel is not the real multiples of the unit");
            o.checks.push_back(r);
        }
    if (all || what == "leibniz")
        for (const auto& s : spaces()) o.checks.push_back(named(check_leibniz(*inst.space(s).lip, f.samples, f.seed, m), "leibniz:" + s));
    if (all || what == "admissible") {
        bool any = false;
        for (const auto& s : inst.spaces)
            if (s.sum) {
                any = true;
                o.checks.push_back(named(verify_admissibility(sum_of(s), f.samples, f.seed, m), "admissible:" + s.name));
            }
        // without stored sums, every bridge gets a sum Lip-norm built on the spot
        if (!any)
            for (const auto& b : inst.bridges) {
                const SumLipNorm s = admissible_sum_lipnorm(b.bridge, inst.space(b.from).lip, inst.space(b.to).lip,
                                                            f.epsilon.value_or(1e-3), m);
                o.checks.push_back(named(verify_admissibility(s, f.samples, f.seed, m), "admissible:" + b.name));
            }
    }
    if (all || what == "target-bounds") {
        TargetCheckOptions t;
        t.samples = f.samples;
        t.seed = f.seed;
        t.tol_exact = f.tol_lp;
        t.tol_iterative = f.tol_iter;
        t.metric = m;
        for (const auto& b : inst.bridges) {
            Trek one(inst.as_space(b.from));
            one.append(b.bridge, inst.as_space(b.to));
            o.checks.push_back(named(verify_target_bounds(one, t), "target-bounds:" + b.name));
        }
        for (const auto& tr : inst.treks) o.checks.push_back(named(verify_target_bounds(inst.trek(tr.name), t), "target-bounds:" + tr.name));
    }
    if (o.checks.empty() && !all && what != "kernel" && what != "leibniz" && what != "admissible" && what != "target-bounds")
        fail(ErrorKind::Input, "unknown verify suite '" + what + "' (leibniz|kernel|admissible|target-bounds|all)");
}

void construct(const Instance& inst, const std::string& what, const std::vector<std::string>& args, const Flags& f,
               Output& o) {
    const MetricOptions m = metric_options(f);
    Instance out;
    if (what == "gh" || what == "classical-bridge") {
        need(args, 2, "construct " + what + " <X> <Y>");
        const GhResult g = gh_bruteforce(metric_of(inst, args[0]), metric_of(inst, args[1]), 5, f.threads);
        const std::string pair = args[0] + "~" + args[1];
        o.add(pair, "gh", CertifiedValue::exact(g.value));
        Json corr = Json::array();
        for (const auto& [x, y] : g.correspondence) corr.push_back({x, y});
        o.extra["correspondence"] = corr;
        if (what == "gh") {
            Json cross = Json::array();
            for (Eigen::Index i = 0; i < g.coupling.cross.rows(); ++i) {
                Json row = Json::array();
                for (Eigen::Index j = 0; j < g.coupling.cross.cols(); ++j) row.push_back(g.coupling.cross(i, j));
                cross.push_back(row);
            }
            o.extra["coupling_cross"] = cross;
            return;
        }
        const ClassicalBridge cb = classical_bridge(g.coupling, f.epsilon.value_or(-1.0));
        o.add(pair, "delta", CertifiedValue::exact(cb.delta));
        o.add(pair, "epsilon", CertifiedValue::exact(cb.epsilon));
        const std::string name = args[0] + "_" + args[1] + "_classical";
        add_length_rows(o, name, bridge_evaluate(*cb.bridge, *cb.lx, *cb.ly, m));
        copy_space(inst, args[0], out);
        copy_space(inst, args[1], out);
        out.bridges.push_back(BridgeEntry{name, args[0], args[1], cb.bridge});
    } else if (what == "diameter-bridge") {
        need(args, 2, "construct diameter-bridge <A> <B>");
        const auto la = inst.space(args[0]).lip, lb = inst.space(args[1]).lip;
        const auto g = std::make_shared<const Bridge>(diameter_bridge(la->parent(), lb->parent()));
        const std::string name = args[0] + "_" + args[1] + "_diameter";
        add_length_rows(o, name, bridge_evaluate(*g, *la, *lb, m));
        o.add(args[0], "diameter", state_diameter(*la, m));
        o.add(args[1], "diameter", state_diameter(*lb, m));
        copy_space(inst, args[0], out);
        copy_space(inst, args[1], out);
        out.bridges.push_back(BridgeEntry{name, args[0], args[1], g});
    } else if (what == "sum-lipnorm") {
        need(args, 1, "construct sum-lipnorm <bridge>");
        const BridgeEntry& b = inst.bridge(args[0]);
        const double eps = f.epsilon.value_or(1e-3);
        const SumLipNorm s = admissible_sum_lipnorm(b.bridge, inst.space(b.from).lip, inst.space(b.to).lip, eps, m);
        const std::string name = b.name + "_sum";
        o.add(b.name, "length", s.length);
        o.add(name, "denominator", CertifiedValue::exact(s.lip->denom()));
        o.add(name, "summand_hausdorff", summand_hausdorff(*s.lip, m));
        copy_space(inst, b.from, out);
        copy_space(inst, b.to, out);
        out.bridges.push_back(b);
        out.spaces.push_back(SpaceEntry{name, s.lip, std::nullopt, SpaceEntry::SumOrigin{b.from, b.to, b.name, eps}});
    } else if (what == "fuzzy-torus") {
        need(args, 0, "construct fuzzy-torus --n N --k K --length arc|chord");
        const FuzzyTorus ft = fuzzy_torus(f.n, f.k, parse_length_choice(f.length));
        const std::string name = "fuzzy_torus_n" + std::to_string(f.n) + "_k" + std::to_string(f.k);
        o.add(name, "kernel_dim", CertifiedValue::exact(ft.lip->kernel_dim()));
        o.add(name, "linear_dim", CertifiedValue::exact(ft.algebra.linear_dim()));
        o.add(name, "diameter_upper_bound", CertifiedValue::exact(diameter_upper_bound(*ft.lip)));
        o.extra["blocks"] = ft.algebra.block_dims();
        out.spaces.push_back(SpaceEntry{name, ft.lip, ft, std::nullopt});
    } else {
        fail(ErrorKind::Input,
             "unknown construction '" + what + "' (classical-bridge|diameter-bridge|sum-lipnorm|fuzzy-torus|gh)");
    }
    o.instance = std::move(out);
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Resource: return kExitResource;
        case ErrorKind::Solver: return kExitSolver;
        default: return kExitInput;
    }
}

void diagnostic(std::ostream& err, const std::string& kind, const std::string& msg) {
    err << Json{{"error", kind}, {"message", msg}}.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"qgp: bridges, treks and propinquity bounds for finite-dimensional quantum metric spaces", "qgp"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--input", f.input, "instance file (default: the bundled two-point instance)");
    app.add_option("--output", f.output, "write the report here instead of stdout");
    app.add_option("--format", f.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--tol-lp", f.tol_lp, "tolerance for exact (LP / vertex) quantities");
    app.add_option("--tol-iter", f.tol_iter, "tolerance for iterative quantities");
    app.add_option("--seed", f.seed, "sampling seed");
    app.add_option("--threads", f.threads, "worker threads for the parallel kernels")->check(CLI::PositiveNumber);
    app.add_option("--samples", f.samples, "samples per verification suite")->check(CLI::PositiveNumber);
    auto* eps = app.add_option("--epsilon", "construction slack");
    app.add_option("--n", f.n, "fuzzy torus order");
    app.add_option("--k", f.k, "fuzzy torus twist");
    app.add_option("--length", f.length, "fuzzy torus length function")->check(CLI::IsMember({"arc", "chord"}));

    struct Cmd {
        const char* name;
        const char* help;
    };
    const Cmd cmds[] = {
        {"lipnorm", "<space> <element>: Lip-norm of a named element"},
        {"mk", "<space> <state> <state>: Monge-Kantorovich distance"},
        {"diam", "<space>: state-space diameter"},
        {"bridge", "<name> seminorm <a> <b> | reach | height | length"},
        {"trek", "<name> length"},
        {"propinquity", "<A> <B>: shortest registered trek"},
        {"construct", "classical-bridge|diameter-bridge|sum-lipnorm|fuzzy-torus|gh ..."},
        {"verify", "leibniz|kernel|admissible|target-bounds|all [space...]"},
        {"export", "write the loaded instance back out"},
        {"demo", "verify all on the bundled instance"},
    };
    std::map<std::string, std::vector<std::string>> args;
    for (const auto& c : cmds) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->fallthrough();
        sub->add_option("args", args[c.name]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        diagnostic(err, "usage", e.what());
        return kExitInput;
    }
    if (eps->count() > 0) f.epsilon = eps->as<double>();

    const std::string cmd = app.get_subcommands().front()->get_name();
    const std::vector<std::string>& a = args[cmd];
    Output o;
    o.command = cmd;
    for (const auto& s : a) o.command += " " + s;

    try {
        const Instance inst = (f.input.empty() || cmd == "demo") ? parse_instance(bundled_instance_text()) : load_instance(f.input);
        const MetricOptions m = metric_options(f);
        if (cmd == "lipnorm") {
            need(a, 2, "lipnorm <space> <element>");
            const NamedElement& x = inst.element(a[1]);
            require(x.space == a[0], ErrorKind::Input, "element " + a[1] + " lives in " + x.space);
            o.add(a[0], "lipnorm:" + a[1], CertifiedValue::exact(eval_lipnorm(*inst.space(a[0]).lip, x.element)));
        } else if (cmd == "mk") {
            need(a, 3, "mk <space> <state> <state>");
            for (size_t i = 1; i < 3; ++i)
                require(inst.state(a[i]).space == a[0], ErrorKind::Input, "state " + a[i] + " lives in " + inst.state(a[i]).space);
            o.add(a[0], "mk:" + a[1] + ":" + a[2], mk_distance(*inst.space(a[0]).lip, inst.state(a[1]).state, inst.state(a[2]).state, m));
        } else if (cmd == "diam") {
            need(a, 1, "diam <space>");
            o.add(a[0], "diameter", state_diameter(*inst.space(a[0]).lip, m));
        } else if (cmd == "bridge") {
            if (a.size() < 2) fail(ErrorKind::Input, "usage: qgp bridge <name> {seminorm <a> <b>|reach|height|length}");
            const BridgeEntry& b = inst.bridge(a[0]);
            const LipNorm& la = *inst.space(b.from).lip;
            const LipNorm& lb = *inst.space(b.to).lip;
            if (a[1] == "seminorm") {
                need(a, 4, "bridge <name> seminorm <a> <b>");
                const NamedElement &x = inst.element(a[2]), &y = inst.element(a[3]);
                require(x.space == b.from && y.space == b.to, ErrorKind::Input, "seminorm elements must live in " + b.from + " and " + b.to);
                o.add(b.name, "seminorm:" + a[2] + ":" + a[3], CertifiedValue::exact(bridge_seminorm(*b.bridge, x.element, y.element)));
            } else if (a[1] == "reach") {
                need(a, 2, "bridge <name> reach");
                o.add(b.name, "reach", reach(*b.bridge, la, lb, m));
            } else if (a[1] == "height") {
                need(a, 2, "bridge <name> height");
                o.add(b.name, "height", height(*b.bridge, la, lb, m));
            } else if (a[1] == "length") {
                need(a, 2, "bridge <name> length");
                add_length_rows(o, b.name, bridge_evaluate(*b.bridge, la, lb, m));
            } else {
                fail(ErrorKind::Input, "unknown bridge quantity '" + a[1] + "'");
            }
        } else if (cmd == "trek") {
            need(a, 2, "trek <name> length");
            require(a[1] == "length", ErrorKind::Input, "unknown trek quantity '" + a[1] + "'");
            const Trek t = inst.trek(a[0]);
            const TrekEntry& t_entry = *std::find_if(inst.treks.begin(), inst.treks.end(), [&](const TrekEntry& e) { return e.name == a[0]; });
            const std::vector<CertifiedValue> legs = leg_lengths(t, m);
            CertifiedValue total = CertifiedValue::exact(0.0);
            for (size_t i = 0; i < legs.size(); ++i) {
                o.add(a[0], "leg" + std::to_string(i) + ":" + t_entry.legs[i], legs[i]);
                total = i == 0 ? legs[i] : cv_sum(total, legs[i]);
            }
            o.add(a[0], "length", total);
        } else if (cmd == "propinquity") {
            need(a, 2, "propinquity <A> <B>");
            const PropinquityBound p = propinquity_upper_bound(inst.registry(m), a[0], a[1]);
            o.add(a[0] + "~" + a[1], "propinquity_upper_bound", p.value);
            o.extra["witness_path"] = p.path;
        } else if (cmd == "construct") {
            if (a.empty()) fail(ErrorKind::Input, "usage: qgp construct {classical-bridge|diameter-bridge|sum-lipnorm|fuzzy-torus|gh} ...");
            construct(inst, a[0], std::vector<std::string>(a.begin() + 1, a.end()), f, o);
        } else if (cmd == "verify" || cmd == "demo") {
            if (cmd == "verify" && a.empty()) fail(ErrorKind::Input, "usage: qgp verify {leibniz|kernel|admissible|target-bounds|all} [space...]");
            verify(inst, cmd == "demo" ? "all" : a[0], cmd == "demo" ? std::vector<std::string>{}
                                                                         : std::vector<std::string>(a.begin() + 1, a.end()),
                   f, o);
        } else if (cmd == "export") {
            need(a, 0, "export");
            o.instance = inst;
            o.raw_instance = true;
        }
    } catch (const Error& e) {
        diagnostic(err, error_kind_name(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        diagnostic(err, "internal", e.what());
        return kExitSolver;
    }

    const std::string text = render(o, f);
    if (f.output.empty()) {
        out << text;
    } else {
        std::ofstream file(f.output, std::ios::binary);
        if (!file) {
            diagnostic(err, "input", "cannot write " + f.output);
            return kExitInput;
        }
        file << text;
    }
    if (!o.passed()) {
        for (const auto& c : o.checks)
            for (const auto& fl : c.failures) diagnostic(err, "verification", c.name + ": " + fl);
        return kExitVerification;
    }
    return kExitOk;
}

}  // namespace qgp
