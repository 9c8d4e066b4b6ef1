// Acceptance run: one line per criterion, exit status 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qgp/cli.hpp"
#include "qgp/instance_json.hpp"
#include "qgp/lp.hpp"
#include "qgp/opnorm.hpp"

using namespace qgp;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok && passed) detail = "FIRST FAILURE " + what + "; " + detail;
        passed = passed && ok;
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::shared_ptr<const LipNorm> lipschitz(const FiniteMetricSpace& x) {
    return std::make_shared<const LipNorm>(LipNorm::finite_lipschitz(x));
}

int size_in(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// 1. identity bridges have zero reach, height and length; the tool reports zero propinquity
Outcome identity_coincidence() {
    Outcome o;
    Rng rng(101);
    double worst = 0.0, worst_cli = 0.0;
    const auto dir = std::filesystem::temp_directory_path();
    for (int t = 0; t < 10; ++t) {
        const FiniteMetricSpace x = random_metric_space(size_in(rng, 1, 6), rng);
        const auto l = lipschitz(x);
        const auto id = std::make_shared<const Bridge>(identity_bridge(l->parent()));
        const BridgeLength len = bridge_evaluate(*id, *l, *l);
        for (const CertifiedValue* v : {&len.reach, &len.height, &len.length}) {
            worst = std::max({worst, std::abs(v->lower), std::abs(v->upper)});
            o.check(std::abs(v->lower) <= 1e-9 && std::abs(v->upper) <= 1e-9, "space " + std::to_string(t));
        }

        // the same space registered twice, joined by the identity bridge, through the command-line tool
        Instance inst;
        inst.spaces.push_back(SpaceEntry{"X", l, std::nullopt, std::nullopt});
        inst.spaces.push_back(SpaceEntry{"X_copy", lipschitz(x), std::nullopt, std::nullopt});
        inst.bridges.push_back(BridgeEntry{"identity", "X", "X_copy", id});
        const std::string path = (dir / ("qgp_accept_identity_" + std::to_string(t) + ".json")).string();
        std::ofstream(path) << dump_instance(inst);
        const char* argv[] = {"qgp", "--input", path.c_str(), "propinquity", "X", "X_copy"};
        std::ostringstream out, err;
        const int code = run_cli(6, argv, out, err);
        o.check(code == 0, "propinquity exit code " + std::to_string(code) + " " + err.str());
        if (code == 0) {
            const Json r = Json::parse(out.str())["results"][0];
            const double v = std::max(std::abs(r["value"].get<double>()), std::abs(r["upper"].get<double>()));
            worst_cli = std::max(worst_cli, v);
            o.check(v <= 1e-9, "propinquity " + fmt(v));
        }
        std::filesystem::remove(path);
    }
    o.detail += "max |reach|,|height|,|length| = " + fmt(worst) + ", max propinquity = " + fmt(worst_cli);
    return o;
}

// optimal transport between uniform measures on k atoms each is attained at a permutation
double transport_by_permutations(const FiniteMetricSpace& x, std::vector<int> p, const std::vector<int>& q) {
    std::sort(p.begin(), p.end());
    double best = kInf;
    do {
        double c = 0.0;
        for (size_t i = 0; i < p.size(); ++i) c += x(p[i], q[i]);
        best = std::min(best, c);
    } while (std::next_permutation(p.begin(), p.end()));
    return best / static_cast<double>(p.size());
}

// 2. mk between Dirac states is the metric; mixed states agree with a permutation oracle
Outcome mk_exactness() {
    Outcome o;
    Rng rng(202);
    double worst = 0.0, worst_mixed = 0.0;
    int pairs = 0;
    for (int t = 0; t < 20; ++t) {
        const int n = size_in(rng, 1, 6);
        const FiniteMetricSpace x = random_metric_space(n, rng);
        const LipNorm l = LipNorm::finite_lipschitz(x);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                // a Dirac pair admits the single coupling delta_(i, j), of cost d(i, j)
                const CertifiedValue v = mk_distance(l, State::dirac(l.parent(), i), State::dirac(l.parent(), j));
                const double err = std::max({std::abs(v.value - x(i, j)), std::abs(v.lower - x(i, j)), std::abs(v.upper - x(i, j))});
                worst = std::max(worst, err);
                o.check(err <= 1e-7, "space " + std::to_string(t) + " pair " + std::to_string(i) + "," + std::to_string(j));
                ++pairs;
            }
        const int atoms = 6;
        std::vector<int> p(atoms), q(atoms);
        std::vector<double> wp(static_cast<size_t>(n)), wq(static_cast<size_t>(n));
        for (int a = 0; a < atoms; ++a) {
            p[static_cast<size_t>(a)] = size_in(rng, 0, n - 1);
            q[static_cast<size_t>(a)] = size_in(rng, 0, n - 1);
            wp[static_cast<size_t>(p[static_cast<size_t>(a)])] += 1.0 / atoms;
            wq[static_cast<size_t>(q[static_cast<size_t>(a)])] += 1.0 / atoms;
        }
        const double oracle = transport_by_permutations(x, p, q);
        const CertifiedValue v = mk_distance(l, State::probabilities(l.parent(), wp), State::probabilities(l.parent(), wq));
        worst_mixed = std::max(worst_mixed, std::abs(v.value - oracle));
        o.check(std::abs(v.value - oracle) <= 1e-7, "mixed states on space " + std::to_string(t));
    }
    o.detail += std::to_string(pairs) + " Dirac pairs, max error " + fmt(worst) + "; mixed-state error " + fmt(worst_mixed);
    return o;
}

// 3. Leibniz property on finite metric spaces and fuzzy tori
Outcome leibniz_suites() {
    Outcome o;
    Rng rng(303);
    int suites = 0;
    for (int t = 0; t < 20; ++t) {
        const LipNorm l = LipNorm::finite_lipschitz(random_metric_space(size_in(rng, 1, 6), rng));
        const Report r = check_leibniz(l, 200, kDefaultSeed + static_cast<std::uint64_t>(t));
        o.check(r.passed, "finite space " + std::to_string(t) + (r.failures.empty() ? "" : ": " + r.failures[0]));
        ++suites;
    }
    const Instance bundled = parse_instance(bundled_instance_text());
    for (const auto& s : bundled.spaces) {
        const Report r = check_leibniz(*s.lip, 200, kDefaultSeed);
        o.check(r.passed, "bundled space " + s.name);
        ++suites;
    }
    for (int n = 2; n <= 4; ++n)
        for (int k = 0; k < n; ++k)
            for (LengthChoice c : {LengthChoice::Arc, LengthChoice::Chord}) {
                const FuzzyTorus ft = fuzzy_torus(n, k, c);
                const Report r = check_leibniz(*ft.lip, 200, kDefaultSeed);
                o.check(r.passed, "fuzzy torus n=" + std::to_string(n) + " k=" + std::to_string(k) + " " + length_choice_name(c) +
                                      (r.failures.empty() ? "" : ": " + r.failures[0]));
                ++suites;
            }
    o.detail += std::to_string(suites) + " Lip-norms, 200 samples each";
    return o;
}

struct ClassicalPair {
    FiniteMetricSpace x, y;
    GhResult gh;
    ClassicalBridge cb;
};

ClassicalPair classical_pair(Rng& rng, int lo, int hi, double eps) {
    ClassicalPair p;
    p.x = random_metric_space(size_in(rng, lo, hi), rng);
    p.y = random_metric_space(size_in(rng, lo, hi), rng);
    p.gh = gh_bruteforce(p.x, p.y);
    p.cb = classical_bridge(p.gh.coupling, eps);
    return p;
}

// 4. classical bridge length against the brute-force GH value; zero height
Outcome classical_domination() {
    Outcome o;
    Rng rng(404);
    double slack = -kInf;
    for (int t = 0; t < 20; ++t) {
        const ClassicalPair p = classical_pair(rng, 1, 5, 1e-3);
        const BridgeLength len = bridge_evaluate(*p.cb.bridge, *p.cb.lx, *p.cb.ly);
        slack = std::max(slack, len.length.upper - (p.gh.value + 2e-3));
        o.check(len.length.upper <= p.gh.value + 2e-3 + 1e-6, "pair " + std::to_string(t) + " length " + fmt(len.length.upper) +
                                                                   " vs gh " + fmt(p.gh.value));
        o.check(len.height.value == 0.0 && len.height.upper == 0.0 && len.height.lower == 0.0, "pair " + std::to_string(t) + " height");
    }
    o.detail += "max(length - gh - 2 eps) = " + fmt(slack) + ", heights exactly 0";
    return o;
}

// 5. L_eps over classical bridges: quotients and summand Hausdorff distance
Outcome admissibility() {
    Outcome o;
    Rng rng(505);
    double dev = 0.0, haus_slack = -kInf;
    for (int t = 0; t < 10; ++t) {
        const ClassicalPair p = classical_pair(rng, 2, 4, 1e-3);
        const double eps = 1e-3;
        const SumLipNorm s = admissible_sum_lipnorm(p.cb.bridge, p.cb.lx, p.cb.ly, eps);
        const Report r = verify_admissibility(s, 50, kDefaultSeed + static_cast<std::uint64_t>(t));
        const double d = std::max(r.get("quotient_deviation_a"), r.get("quotient_deviation_b"));
        dev = std::max(dev, d);
        const double h = r.get("hausdorff_upper") - (2.0 * s.length.upper + eps);
        haus_slack = std::max(haus_slack, h);
        o.check(d <= 1e-6, "instance " + std::to_string(t) + " quotient deviation " + fmt(d));
        o.check(h <= 1e-6, "instance " + std::to_string(t) + " Hausdorff exceeds 2 length + eps by " + fmt(h));
        o.check(r.passed, "instance " + std::to_string(t) + (r.failures.empty() ? "" : ": " + r.failures[0]));
    }
    o.detail += "max quotient deviation " + fmt(dev) + ", max(Haus - 2 length - eps) = " + fmt(haus_slack);
    return o;
}

// 6. diameter bridges never exceed the larger state-space diameter
Outcome diameter_bound() {
    Outcome o;
    Rng rng(606);
    double slack = -kInf;
    for (int t = 0; t < 10; ++t) {
        const FiniteMetricSpace x = random_metric_space(size_in(rng, 1, 5), rng);
        const FiniteMetricSpace y = random_metric_space(size_in(rng, 1, 5), rng);
        const LipNorm lx = LipNorm::finite_lipschitz(x), ly = LipNorm::finite_lipschitz(y);
        const Bridge g = diameter_bridge(lx.parent(), ly.parent());
        const CertifiedValue len = bridge_length(g, lx, ly);
        const double diam = std::max(state_diameter(lx).upper, state_diameter(ly).upper);
        slack = std::max(slack, len.upper - diam);
        o.check(len.upper <= diam + 1e-6, "pair " + std::to_string(t));
    }
    // noncommutative pair: the length bracket is compared with the diameter brackets
    const FuzzyTorus a = fuzzy_torus(2, 1), b = fuzzy_torus(2, 0);
    const Bridge g = diameter_bridge(a.algebra, b.algebra);
    const CertifiedValue len = bridge_length(g, *a.lip, *b.lip);
    const CertifiedValue da = state_diameter(*a.lip), db = state_diameter(*b.lip);
    const double diam_upper = std::max(da.upper, db.upper), diam_lower = std::max(da.lower, db.lower);
    o.check(len.lower <= diam_upper + 1e-3, "fuzzy torus length lower bound above the diameter upper bound");
    o.check(len.upper <= diam_lower + 1e-3, "fuzzy torus length upper bound " + fmt(len.upper) + " vs diameter lower bound " + fmt(diam_lower));
    o.detail += "classical max(length - diam) = " + fmt(slack) + "; fuzzy torus length in [" + fmt(len.lower) + ", " + fmt(len.upper) +
                "], diameter in [" + fmt(diam_lower) + ", " + fmt(diam_upper) + "]";
    return o;
}

// 7. target-set inequalities along single- and two-leg treks
Outcome target_sets() {
    Outcome o;
    Rng rng(707);
    TargetCheckOptions opt;
    opt.samples = 50;
    opt.tol_exact = 1e-6;
    opt.tol_iterative = 1e-3;
    double worst = -kInf;
    auto run = [&](const Trek& t, const std::string& label) {
        const Report r = verify_target_bounds(t, opt);
        for (const auto& [k, v] : r.metrics)
            if (k.rfind("max_slack.", 0) == 0) worst = std::max(worst, v);
        o.check(r.passed, label + (r.failures.empty() ? "" : ": " + r.failures[0]));
    };
    for (int t = 0; t < 2; ++t) {
        const ClassicalPair p = classical_pair(rng, 2, 4, 1e-3);
        Trek one(Space{"X", p.cb.lx});
        one.append(p.cb.bridge, Space{"Y", p.cb.ly});
        opt.seed = kDefaultSeed + static_cast<std::uint64_t>(t);
        run(one, "single-leg trek " + std::to_string(t));
    }
    for (int t = 0; t < 2; ++t) {
        // X -> Y -> Z with classical bridges on the GH couplings of consecutive spaces
        const FiniteMetricSpace x = random_metric_space(size_in(rng, 2, 4), rng);
        const FiniteMetricSpace y = random_metric_space(size_in(rng, 2, 4), rng);
        const FiniteMetricSpace z = random_metric_space(size_in(rng, 2, 4), rng);
        const ClassicalBridge xy = classical_bridge(gh_bruteforce(x, y).coupling, 1e-3);
        const ClassicalBridge yz = classical_bridge(gh_bruteforce(y, z).coupling, 1e-3);
        Trek fixed(Space{"X", xy.lx});
        fixed.append(xy.bridge, Space{"Y", xy.ly});
        fixed.append(yz.bridge, Space{"Z", yz.ly});
        opt.seed = kDefaultSeed + 100 + static_cast<std::uint64_t>(t);
        run(fixed, "two-leg trek " + std::to_string(t));
    }
    const int classical_runs = 4;
    opt.samples = 20;
    opt.seed = kDefaultSeed;
    const FuzzyTorus a = fuzzy_torus(2, 1), b = fuzzy_torus(2, 0);
    Trek ft(Space{"T21", a.lip});
    ft.append(std::make_shared<const Bridge>(diameter_bridge(a.algebra, b.algebra)), Space{"T20", b.lip});
    run(ft, "fuzzy torus trek");
    o.detail += std::to_string(classical_runs) + " classical treks x 50 samples, fuzzy torus trek x 20 samples, max scaled slack " + fmt(worst);
    return o;
}

// 8. trek composition and registry propinquity bounds behave like a metric
Outcome metric_axioms() {
    Outcome o;
    Rng rng(808);
    const std::vector<std::string> names = {"S0", "S1", "S2", "S3", "S4"};
    std::vector<FiniteMetricSpace> xs;
    Registry reg;
    for (const auto& n : names) {
        xs.push_back(random_metric_space(size_in(rng, 2, 4), rng));
        reg.add_space(n, lipschitz(xs.back()));
    }
    // classical bridges along a path plus two chords
    const std::vector<std::pair<int, int>> links = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 3}, {1, 4}};
    for (const auto& [i, j] : links) {
        const ClassicalBridge cb = classical_bridge(gh_bruteforce(xs[static_cast<size_t>(i)], xs[static_cast<size_t>(j)]).coupling, 1e-3);
        reg.add_bridge(names[static_cast<size_t>(i)], names[static_cast<size_t>(j)], cb.bridge);
    }

    // composition adds lengths exactly
    const PropinquityBound p01 = propinquity_upper_bound(reg, "S0", "S1");
    const PropinquityBound p12 = propinquity_upper_bound(reg, "S1", "S2");
    const Trek joined = compose(p01.trek, p12.trek);
    const CertifiedValue l01 = trek_length(p01.trek), l12 = trek_length(p12.trek), lj = trek_length(joined);
    o.check(lj.value == l01.value + l12.value && lj.upper == l01.upper + l12.upper, "composed length is not the sum");

    double sym = 0.0, tri = -kInf;
    int triples = 0;
    for (const auto& x : names)
        for (const auto& y : names) {
            const PropinquityBound fwd = propinquity_upper_bound(reg, x, y);
            // the reversed witness, evaluated from scratch through inverse bridges
            const double back = trek_length(invert(fwd.trek)).upper;
            sym = std::max({sym, std::abs(back - fwd.value.upper),
                            std::abs(propinquity_upper_bound(reg, y, x).value.upper - fwd.value.upper)});
            for (const auto& z : names) {
                const double d = propinquity_upper_bound(reg, x, z).value.upper -
                                 (fwd.value.upper + propinquity_upper_bound(reg, y, z).value.upper);
                tri = std::max(tri, d);
                ++triples;
            }
        }
    o.check(sym <= 1e-7, "symmetry deviation " + fmt(sym));
    o.check(tri <= 1e-9, "triangle excess " + fmt(tri));
    o.detail += "symmetry deviation " + fmt(sym) + ", max triangle excess " + fmt(tri) + " over " + std::to_string(triples) + " triples";
    return o;
}

// 9. simplex duality gaps and the exact operator-norm path
Outcome solver_regression() {
    Outcome o;
    Rng rng(909);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.5, 2.0);
    double gap = 0.0, resid = 0.0;
    for (int t = 0; t < 50; ++t) {
        // optimize c.x over {A x <= b, x >= 0}, x >= 0 written as rows so the dual has one sign per row
        const int n = size_in(rng, 2, 6), m = size_in(rng, 2, 8);
        const bool maximize = t % 2 == 0;
        RMatrix a(m + n, n);
        RVector b(m + n), c(n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = std::abs(g(rng)) + 0.1;
            b(i) = u(rng) * n;
        }
        a.bottomRows(n) = -RMatrix::Identity(n, n);
        b.tail(n).setZero();
        for (int j = 0; j < n; ++j) c(j) = maximize ? u(rng) : g(rng) + 0.5;
        LinearProgram lp = make_lp(n, maximize);
        lp.objective = c;
        for (int i = 0; i < m + n; ++i) lp.add_row(a.row(i).transpose(), Sense::LessEqual, b(i));
        const LpSolution s = solve_lp(lp);
        o.check(s.status == LpStatus::Optimal, "program " + std::to_string(t) + " status " + lp_status_name(s.status));
        if (s.status != LpStatus::Optimal) continue;
        // recompute the dual objective and its feasibility from the reported multipliers:
        // max c.x <= b.y over y >= 0, A^T y = c; a minimization is the maximization of -c
        const RVector y = maximize ? RVector(s.row_duals) : RVector(-s.row_duals);
        const RVector cc = maximize ? RVector(c) : RVector(-c);
        const double dual = maximize ? b.dot(y) : -b.dot(y);
        const double scale = 1.0 + std::abs(s.value);
        gap = std::max({gap, std::abs(c.dot(s.x) - dual) / scale, s.duality_gap / scale});
        resid = std::max({resid, (a.transpose() * y - cc).cwiseAbs().maxCoeff(), std::max(0.0, -y.minCoeff()),
                          std::max(0.0, (a * s.x - b).maxCoeff())});
    }
    o.check(gap <= 1e-9, "duality gap " + fmt(gap));
    o.check(resid <= 1e-9, "dual or primal residual " + fmt(resid));

    double opn = 0.0;
    for (int t = 0; t < 20; ++t) {
        const int blocks = size_in(rng, 1, 6), params = size_in(rng, 1, 3);
        AffineFamily f;
        RMatrix c0(blocks, 1), ci(blocks, params);
        for (int k = 0; k < blocks; ++k) {
            c0(k) = g(rng);
            for (int i = 0; i < params; ++i) ci(k, i) = g(rng);
        }
        for (int k = 0; k < blocks; ++k) f.m0.push_back(CMatrix::Constant(1, 1, c0(k)));
        f.mi.resize(static_cast<size_t>(params));
        for (int i = 0; i < params; ++i)
            for (int k = 0; k < blocks; ++k) f.mi[static_cast<size_t>(i)].push_back(CMatrix::Constant(1, 1, ci(k, i)));
        RMatrix box(2 * params, params);
        box << RMatrix::Identity(params, params), -RMatrix::Identity(params, params);
        RVector radius(2 * params);
        for (int i = 0; i < params; ++i) radius(i) = radius(params + i) = u(rng);
        const OpnormResult r = min_opnorm_affine(f, Polytope(box, radius));
        // min s subject to |c0 + ci t| <= s and the box, straight through the simplex
        LinearProgram lp = make_lp(params + 1, false);
        lp.objective(params) = 1;
        for (int k = 0; k < blocks; ++k) {
            RVector row(params + 1);
            row.head(params) = ci.row(k).transpose();
            row(params) = -1;
            lp.add_row(row, Sense::LessEqual, -c0(k));
            row.head(params) = -ci.row(k).transpose();
            lp.add_row(row, Sense::LessEqual, c0(k));
        }
        for (int i = 0; i < 2 * params; ++i) {
            RVector row = RVector::Zero(params + 1);
            row.head(params) = box.row(i).transpose();
            lp.add_row(row, Sense::LessEqual, radius(i));
        }
        const LpSolution s = solve_lp(lp);
        opn = std::max(opn, std::abs(r.value.value - s.value));
        o.check(r.value.method == Method::ExactLp, "commutative family not on the exact path");
    }
    o.check(opn <= 1e-9, "min_opnorm_affine deviation " + fmt(opn));
    o.detail += "50 programs, max scaled gap " + fmt(gap) + ", residual " + fmt(resid) + "; opnorm vs LP " + fmt(opn) + " on 20 families";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"identity coincidence", 5, identity_coincidence},
        {"MK exactness", 30, mk_exactness},
        {"Leibniz suites", 60, leibniz_suites},
        {"classical domination", 120, classical_domination},
        {"admissibility", 120, admissibility},
        {"diameter bound", 120, diameter_bound},
        {"target-set inequalities", 180, target_sets},
        {"metric axioms", 10, metric_axioms},
        {"solver regression", 10, solver_regression},
    };
    int failed = 0;
    double total = 0.0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        total += secs;
        const bool in_time = secs <= criteria[i].budget_s;
        const bool ok = o.passed && in_time;
        failed += ok ? 0 : 1;
        std::printf("%s %zu %s: %s [%.2f s of %.0f s%s]\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str(), secs,
                    criteria[i].budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failed, criteria.size(), total);
    return failed == 0 ? 0 : 1;
}
