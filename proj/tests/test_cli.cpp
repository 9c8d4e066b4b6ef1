#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "qgp/cli.hpp"
#include "qgp/instance_json.hpp"

using namespace qgp;

namespace {

struct CliRun {
    int code;
    std::string out, err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "qgp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

Json report(const CliRun& r) { return Json::parse(r.out); }

std::string temp_file(const std::string& name, const std::string& text) {
    const std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << text;
    return path;
}

void expect_same(const Instance& x, const Instance& y) {
    ASSERT_EQ(x.spaces.size(), y.spaces.size());
    for (const auto& s : x.spaces) {
        const LipNorm &a = *s.lip, &b = *y.space(s.name).lip;
        EXPECT_EQ(a.kind(), b.kind());
        EXPECT_EQ(a.parent(), b.parent());
        EXPECT_EQ(a.space().dist(), b.space().dist());
        EXPECT_EQ(a.functionals(), b.functionals());
        ASSERT_EQ(a.elements().size(), b.elements().size());
        for (size_t i = 0; i < a.elements().size(); ++i) {
            EXPECT_EQ(a.elements()[i].perm, b.elements()[i].perm);
            EXPECT_EQ(a.elements()[i].length, b.elements()[i].length);
            for (size_t t = 0; t < a.elements()[i].unitaries.size(); ++t)
                EXPECT_EQ(a.elements()[i].unitaries[t], b.elements()[i].unitaries[t]);
        }
        EXPECT_EQ(a.denom(), b.denom());
    }
    ASSERT_EQ(x.bridges.size(), y.bridges.size());
    for (const auto& b : x.bridges) {
        const BridgeEntry& c = y.bridge(b.name);
        EXPECT_EQ(b.from, c.from);
        EXPECT_EQ(b.to, c.to);
        EXPECT_TRUE(structurally_equal(*b.bridge, *c.bridge));
    }
    ASSERT_EQ(x.treks.size(), y.treks.size());
    // treks from different parses hold different Lip-norm pointers, so legs are matched by name
    for (const auto& t : x.treks) {
        const Trek a = x.trek(t.name), b = y.trek(t.name);
        ASSERT_EQ(a.size(), b.size());
        EXPECT_EQ(a.start().name, b.start().name);
        for (size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a.legs()[i].to.name, b.legs()[i].to.name);
            EXPECT_TRUE(structurally_equal(*a.legs()[i].bridge, *b.legs()[i].bridge));
        }
    }
    ASSERT_EQ(x.states.size(), y.states.size());
    for (const auto& s : x.states)
        for (size_t i = 0; i < s.state.density_blocks().size(); ++i)
            EXPECT_EQ(s.state.density_blocks()[i], y.state(s.name).state.density_blocks()[i]);
    ASSERT_EQ(x.elements.size(), y.elements.size());
    for (const auto& e : x.elements) EXPECT_TRUE(structurally_equal(e.element, y.element(e.name).element));
}

}  // namespace

TEST(Cli, BundledExamples) {
    const CliRun mk = run({"mk", "twopoint", "dirac_p", "dirac_q"});
    ASSERT_EQ(mk.code, 0) << mk.err;
    EXPECT_EQ(report(mk)["results"][0]["value"].get<double>(), 1.0);

    const CliRun id = run({"bridge", "identity", "length"});
    ASSERT_EQ(id.code, 0) << id.err;
    for (const auto& r : report(id)["results"]) EXPECT_EQ(r["value"].get<double>(), 0.0);

    const CliRun all = run({"verify", "all"});
    EXPECT_EQ(all.code, 0) << all.err;
    EXPECT_TRUE(report(all)["passed"].get<bool>());

    const CliRun lip = run({"lipnorm", "twopoint", "f"});
    EXPECT_EQ(report(lip)["results"][0]["value"].get<double>(), 1.0);
    const CliRun semi = run({"bridge", "identity", "seminorm", "f", "f"});
    EXPECT_EQ(report(semi)["results"][0]["value"].get<double>(), 0.0);
}

TEST(Cli, ReportsAreReproducible) {
    const CliRun a = run({"verify", "target-bounds", "--samples", "5", "--seed", "77"});
    const CliRun b = run({"verify", "target-bounds", "--samples", "5", "--seed", "77", "--threads", "3"});
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, run({"verify", "target-bounds", "--samples", "5", "--seed", "78"}).out);
    const CliRun csv = run({"trek", "there_and_back", "length", "--format", "csv"});
    EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "name,quantity,value,lower,upper,method,seed");
    EXPECT_NE(csv.out.find("there_and_back,length,1,1,1,"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({}).code, kExitInput);
    EXPECT_EQ(run({"mk", "twopoint", "dirac_p"}).code, kExitInput);
    EXPECT_EQ(run({"mk", "twopoint", "dirac_p", "missing"}).code, kExitInput);
    EXPECT_EQ(run({"--input", "/nonexistent/file.json", "diam", "twopoint"}).code, kExitInput);
    EXPECT_EQ(run({"construct", "fuzzy-torus", "--n", "17", "--k", "1"}).code, kExitResource);
    const CliRun bad = run({"--input", temp_file("bad.json", "{\"spaces\": {\"x\": {\"kind\": \"finite_metric\", "
                                                         "\"distances\": [[0, 1], [2, 0]]}}}"),
                         "diam", "x"});
    EXPECT_EQ(bad.code, kExitInput);
    EXPECT_NE(bad.err.find("\"error\""), std::string::npos);
    EXPECT_EQ(run({"--input", temp_file("garbage.json", "{not json"), "diam", "x"}).code, kExitInput);

    // a Lip-norm that is not Leibniz is a failed verification, not an input error
    const std::string non_leibniz = R"({"spaces": {"c3": {"kind": "matrix_algebra", "blocks": [1, 1, 1],
        "lipnorm": {"kind": "polytope_custom", "functionals": [[1, -1, 0], [100, 100, -200]]}}}})";
    const CliRun lv = run({"--input", temp_file("nl.json", non_leibniz), "verify", "leibniz", "--samples", "200"});
    EXPECT_EQ(lv.code, kExitVerification) << lv.out;
    EXPECT_NE(lv.err.find("verification"), std::string::npos);
}

TEST(Cli, SchemaRoundTrip) {
    const Instance bundled = parse_instance(bundled_instance_text());
    expect_same(bundled, parse_instance(dump_instance(bundled)));
    EXPECT_EQ(dump_instance(bundled), dump_instance(parse_instance(dump_instance(bundled))));

    const CliRun ft = run({"construct", "fuzzy-torus", "--n", "3", "--k", "2", "--length", "chord"});
    ASSERT_EQ(ft.code, 0) << ft.err;
    const Instance fti = parse_instance(ft.out);
    expect_same(fti, parse_instance(dump_instance(fti)));
    ASSERT_TRUE(fti.spaces[0].torus.has_value());
    EXPECT_EQ(fti.spaces[0].torus->choice, LengthChoice::Chord);

    const CliRun cb = run({"construct", "classical-bridge", "twopoint", "twopoint_wide", "--epsilon", "0.01"});
    ASSERT_EQ(cb.code, 0) << cb.err;
    const std::string cb_file = temp_file("cb.json", cb.out);
    const CliRun sum = run({"--input", cb_file, "construct", "sum-lipnorm", "twopoint_twopoint_wide_classical"});
    ASSERT_EQ(sum.code, 0) << sum.err;
    const Instance si = parse_instance(sum.out);
    expect_same(si, parse_instance(dump_instance(si)));
    const CliRun ver = run({"--input", temp_file("sum.json", sum.out), "verify", "admissible"});
    EXPECT_EQ(ver.code, 0) << ver.err;

    // a matrix-algebra space written with its action survives export
    Instance m2;
    const FuzzyTorus p = fuzzy_torus(2, 1);
    m2.spaces.push_back(SpaceEntry{"m2", std::make_shared<const LipNorm>(LipNorm::ergodic_action(p.algebra, p.lip->elements())),
                                   std::nullopt, std::nullopt});
    expect_same(m2, parse_instance(dump_instance(m2)));
    const CliRun exp = run({"--input", temp_file("m2.json", dump_instance(m2)), "export"});
    EXPECT_EQ(exp.out, dump_instance(m2) + "\n");
}

TEST(Cli, Propinquity) {
    const CliRun p = run({"propinquity", "twopoint", "twopoint_wide"});
    ASSERT_EQ(p.code, 0) << p.err;
    const Json j = report(p);
    EXPECT_EQ(j["results"][0]["upper"].get<double>(), 0.5);
    EXPECT_EQ(j["witness_path"], Json::array({"twopoint", "twopoint_wide"}));
    EXPECT_EQ(report(run({"propinquity", "twopoint", "twopoint"}))["results"][0]["value"].get<double>(), 0.0);
}
