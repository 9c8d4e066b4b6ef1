#include "qgp/treks.hpp"

#include <cmath>
#include <queue>
#include <sstream>

#include "qgp/parallel.hpp"

namespace qgp {

namespace {

void check_leg(const Space& from, const Bridge& g, const Space& to) {
    require(from.lip && to.lip, ErrorKind::Structural, "trek: space without a Lip-norm");
    require(g.a() == from.algebra(), ErrorKind::Structural, "trek: bridge domain does not match '" + from.name + "'");
    require(g.b() == to.algebra(), ErrorKind::Structural, "trek: bridge codomain does not match '" + to.name + "'");
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

}  // namespace

Trek::Trek(Space start) : start_(std::move(start)) {
    require(start_.lip != nullptr, ErrorKind::Structural, "trek: start space without a Lip-norm");
}

void Trek::append(std::shared_ptr<const Bridge> bridge, Space to, std::optional<CertifiedValue> length) {
    require(bridge != nullptr, ErrorKind::Structural, "trek: null bridge");
    check_leg(end(), *bridge, to);
    legs_.push_back(TrekLeg{end(), std::move(bridge), std::move(to), std::move(length)});
}

Trek compose(const Trek& first, const Trek& second) {
    require(first.end().lip == second.start().lip, ErrorKind::Structural,
            "compose: '" + first.end().name + "' is not the start of the second trek");
    Trek out = first;
    for (const auto& l : second.legs()) out.append(l.bridge, l.to, l.length);
    return out;
}

Trek invert(const Trek& t) {
    Trek out(t.end());
    for (auto it = t.legs().rbegin(); it != t.legs().rend(); ++it)
        out.append(std::make_shared<const Bridge>(inverse_bridge(*it->bridge)), it->from);
    return out;
}

bool structurally_equal(const Trek& x, const Trek& y, double tol) {
    if (x.start().lip != y.start().lip || x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i) {
        const TrekLeg& a = x.legs()[i];
        const TrekLeg& b = y.legs()[i];
        if (a.to.lip != b.to.lip || !structurally_equal(*a.bridge, *b.bridge, tol)) return false;
    }
    return true;
}

std::vector<CertifiedValue> leg_lengths(const Trek& t, const MetricOptions& opt) {
    std::vector<CertifiedValue> out;
    for (const auto& l : t.legs())
        out.push_back(l.length ? *l.length : bridge_length(*l.bridge, *l.from.lip, *l.to.lip, opt));
    return out;
}

CertifiedValue trek_length(const Trek& t, const MetricOptions& opt) {
    CertifiedValue sum = CertifiedValue::exact(0.0);
    for (const auto& v : leg_lengths(t, opt)) sum = cv_sum(sum, v);
    return sum;
}

void Registry::add_space(const std::string& name, std::shared_ptr<const LipNorm> lip) {
    require(!name.empty(), ErrorKind::Input, "registry: empty space name");
    require(lip != nullptr, ErrorKind::Structural, "registry: null Lip-norm for '" + name + "'");
    require(!has_space(name), ErrorKind::Input, "registry: duplicate space '" + name + "'");
    spaces_.emplace(name, std::move(lip));
}

void Registry::add_bridge(const std::string& from, const std::string& to, std::shared_ptr<const Bridge> bridge,
                          std::optional<CertifiedValue> length, const MetricOptions& opt) {
    const Space a = space(from);
    const Space b = space(to);
    require(bridge != nullptr, ErrorKind::Structural, "registry: null bridge");
    check_leg(a, *bridge, b);
    const CertifiedValue len = length ? *length : bridge_length(*bridge, *a.lip, *b.lip, opt);
    require(len.lower >= 0.0 && len.upper >= len.lower, ErrorKind::Domain, "registry: invalid bridge length");
    edges_.push_back(RegistryEdge{from, to, std::move(bridge), len});
}

Space Registry::space(const std::string& name) const {
    const auto it = spaces_.find(name);
    require(it != spaces_.end(), ErrorKind::Input, "registry: unknown space '" + name + "'");
    return Space{name, it->second};
}

std::vector<std::string> Registry::space_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : spaces_) out.push_back(k);
    return out;
}

PropinquityBound propinquity_upper_bound(const Registry& reg, const std::string& a, const std::string& b) {
    const Space sa = reg.space(a);
    reg.space(b);
    // node indices follow the sorted names, so index order is the lexicographic tie-break
    const std::vector<std::string> names = reg.space_names();
    const int n = static_cast<int>(names.size());
    auto index = [&](const std::string& s) {
        return static_cast<int>(std::lower_bound(names.begin(), names.end(), s) - names.begin());
    };
    struct Arc {
        int to;
        size_t edge;
        bool reversed;
    };
    std::vector<std::vector<Arc>> adj(static_cast<size_t>(n));
    for (size_t e = 0; e < reg.edges().size(); ++e) {
        const RegistryEdge& ed = reg.edges()[e];
        const int u = index(ed.from), v = index(ed.to);
        adj[static_cast<size_t>(u)].push_back({v, e, false});
        if (u != v) adj[static_cast<size_t>(v)].push_back({u, e, true});
    }
    std::vector<double> dist(static_cast<size_t>(n), kInf);
    std::vector<int> prev(static_cast<size_t>(n), -1);
    std::vector<Arc> via(static_cast<size_t>(n), Arc{-1, 0, false});
    std::vector<bool> done(static_cast<size_t>(n), false);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    const int src = index(a), dst = index(b);
    dist[static_cast<size_t>(src)] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (done[static_cast<size_t>(u)]) continue;
        done[static_cast<size_t>(u)] = true;
        for (const Arc& arc : adj[static_cast<size_t>(u)]) {
            const double nd = d + reg.edges()[arc.edge].length.upper;
            const size_t v = static_cast<size_t>(arc.to);
            // on ties keep the predecessor with the smaller name
            if (nd < dist[v] || (nd == dist[v] && !done[v] && prev[v] > u)) {
                dist[v] = nd;
                prev[v] = u;
                via[v] = arc;
                pq.push({nd, arc.to});
            }
        }
    }
    require(std::isfinite(dist[static_cast<size_t>(dst)]), ErrorKind::NoPath,
            "no trek from '" + a + "' to '" + b + "' in the registry; registering a diameter bridge connects them");

    std::vector<Arc> arcs;
    for (int v = dst; v != src; v = prev[static_cast<size_t>(v)]) arcs.push_back(via[static_cast<size_t>(v)]);
    std::reverse(arcs.begin(), arcs.end());
    PropinquityBound out;
    out.trek = Trek(sa);
    out.path.push_back(a);
    out.value = CertifiedValue::exact(0.0);
    for (const Arc& arc : arcs) {
        const RegistryEdge& e = reg.edges()[arc.edge];
        // inverse bridges have the same length, so one stored value serves both directions
        auto g = arc.reversed ? std::make_shared<const Bridge>(inverse_bridge(*e.bridge)) : e.bridge;
        out.trek.append(std::move(g), reg.space(names[static_cast<size_t>(arc.to)]), e.length);
        out.path.push_back(names[static_cast<size_t>(arc.to)]);
        out.value = cv_sum(out.value, e.length);
    }
    out.value.note = out.value.note.empty() ? "upper bound relative to registry"
                                            : out.value.note + "; upper bound relative to registry";
    return out;
}

bool target_set_membership(const Bridge& g, const LipNorm& la, const LipNorm& lb, const Element& a, double r,
                           const Element& b, std::optional<double> rho, const MetricOptions& opt) {
    require(a.parent() == g.a() && b.parent() == g.b(), ErrorKind::Structural, "target set: parents do not match the bridge");
    require(a.is_selfadjoint(1e-12), ErrorKind::Domain, "target set: a must be self-adjoint");
    require(std::isfinite(r) && eval_lipnorm(la, a) <= r + 1e-9, ErrorKind::Domain, "target set: r must be at least L_A(a)");
    if (!b.is_selfadjoint(1e-12)) return false;
    const double p = rho ? *rho : reach(g, la, lb, opt).upper;
    return eval_lipnorm(lb, b) <= r + 1e-9 && bridge_seminorm(g, a, b) <= r * p + 1e-9;
}

Itinerary greedy_itinerary(const Trek& t, const Element& a, double r, const MetricOptions& opt) {
    require(a.parent() == t.start().algebra(), ErrorKind::Structural, "itinerary: start element not in the start space");
    require(eval_lipnorm(*t.start().lip, a) <= r + 1e-9, ErrorKind::Domain, "itinerary: r must be at least L(a)");
    Itinerary eta{a};
    for (const auto& l : t.legs()) eta.push_back(best_target(*l.bridge, *l.to.lip, eta.back(), r, opt).b);
    return eta;
}

Report verify_target_bounds(const Trek& t, const TargetCheckOptions& opt) {
    Report rep;
    rep.name = "target-bounds";
    std::vector<BridgeLength> legs;
    bool iterative = !t.start().lip->polytopal();
    for (const auto& l : t.legs()) {
        legs.push_back(bridge_evaluate(*l.bridge, *l.from.lip, *l.to.lip, opt.metric));
        iterative = iterative || legs.back().length.method == Method::Iterative || !l.to.lip->polytopal();
    }
    double lambda = 0.0;
    for (const auto& b : legs) lambda += b.length.upper;
    const double tol = iterative ? opt.tol_iterative : opt.tol_exact;
    rep.metric("trek_length_upper", lambda);
    rep.metric("tolerance", tol);
    const Algebra& a1 = t.start().algebra();
    const LipNorm& l1 = *t.start().lip;

    // worst excess of an itinerary over the r-itinerary conditions, relative to tolerance scale
    auto chain_excess = [&](const Itinerary& eta, double r) {
        double worst = eval_lipnorm(l1, eta[0]) - r;
        for (size_t j = 0; j < t.size(); ++j) {
            const TrekLeg& l = t.legs()[j];
            worst = std::max(worst, eval_lipnorm(*l.to.lip, eta[j + 1]) - r);
            worst = std::max(worst, bridge_seminorm(*l.bridge, eta[j], eta[j + 1]) - r * legs[j].reach.upper);
        }
        return worst;
    };

    struct Sample {
        std::vector<std::string> failures;
        std::vector<double> slack;  // lhs - rhs per family, before tolerance
        std::string solver_error;
    };
    const char* families[] = {"itinerary", "norm", "distance", "diameter", "linear", "jordan", "lie"};
    const int nfam = 7;
    std::vector<Sample> samples(static_cast<size_t>(std::max(0, opt.samples)));
    parallel_for(opt.samples, opt.metric.threads, [&](int k) {
        Sample& s = samples[static_cast<size_t>(k)];
        s.slack.assign(nfam, -kInf);
        Rng rng(opt.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1));
        std::uniform_real_distribution<double> scale(0.5, 2.0), spread(1.0, 1.5), tdist(-2.0, 2.0);
        try {
            const Element a = random_selfadjoint(a1, rng, scale(rng));
            const Element ap = random_selfadjoint(a1, rng, scale(rng));
            const double la = eval_lipnorm(l1, a), lap = eval_lipnorm(l1, ap);
            double r = std::max(la, lap) * spread(rng);
            if (r <= 0.0) r = 1.0;
            const Itinerary eta = greedy_itinerary(t, a, r, opt.metric);
            const Itinerary etap = greedy_itinerary(t, ap, r, opt.metric);
            const Itinerary etat = greedy_itinerary(t, a, std::max(la, 0.5 * r), opt.metric);
            const Element& b = eta.back();
            const Element& bp = etap.back();
            const Element& bt = etat.back();
            auto record = [&](int fam, double lhs, double rhs, const std::string& what) {
                const double slack = lhs - rhs;
                s.slack[static_cast<size_t>(fam)] = std::max(s.slack[static_cast<size_t>(fam)], slack);
                if (slack > tol * (1.0 + std::abs(rhs)))
                    s.failures.push_back("sample " + std::to_string(k) + ": " + families[fam] + " " + what + ": " +
                                         fmt(lhs) + " > " + fmt(rhs));
            };
            record(0, chain_excess(eta, r), 0.0, "r-itinerary for a");
            record(0, chain_excess(etap, r), 0.0, "r-itinerary for a'");
            record(0, chain_excess(etat, r), 0.0, "shrunken itinerary");
            record(1, op_norm(b), 2.0 * r * lambda + op_norm(a), "||b||");
            record(1, op_norm(bp), 2.0 * r * lambda + op_norm(ap), "||b'||");
            record(2, op_norm(b - bp), 4.0 * r * lambda + op_norm(a - ap), "||b - b'||");
            record(3, op_norm(b - bt), 4.0 * r * lambda, "target diameter");

            const double tt = tdist(rng);
            const double rl = r + std::abs(tt) * r;
            Itinerary lin;
            for (size_t j = 0; j < eta.size(); ++j) lin.push_back(eta[j] + tt * etap[j]);
            record(4, chain_excess(lin, rl), 0.0, "b + t b'");

            const double rp = r * (4.0 * r * lambda + op_norm(a) + op_norm(ap));
            Itinerary jor, lie;
            for (size_t j = 0; j < eta.size(); ++j) {
                auto [x, y] = jordan_lie(eta[j], etap[j]);
                jor.push_back(std::move(x));
                lie.push_back(std::move(y));
            }
            record(5, chain_excess(jor, rp), 0.0, "Jordan product");
            record(6, chain_excess(lie, rp), 0.0, "Lie product");
        } catch (const Error& e) {
            s.solver_error = "sample " + std::to_string(k) + ": " + error_kind_name(e.kind()) + " failure: " + e.what();
        }
    });
    std::vector<double> worst(nfam, -kInf);
    for (const auto& s : samples) {
        for (const auto& f : s.failures) rep.fail(f);
        if (!s.solver_error.empty()) rep.fail(s.solver_error);
        for (int f = 0; f < nfam; ++f) worst[static_cast<size_t>(f)] = std::max(worst[static_cast<size_t>(f)], s.slack[static_cast<size_t>(f)]);
    }
    for (int f = 0; f < nfam; ++f) rep.metric(std::string("max_slack.") + families[f], worst[static_cast<size_t>(f)]);
    rep.metric("samples", static_cast<double>(opt.samples));
    if (iterative) rep.notes.push_back("iterative tolerance in effect");
    return rep;
}

}  // namespace qgp
