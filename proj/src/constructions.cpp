#include "qgp/constructions.hpp"

#include <cmath>
#include <numeric>

#include "qgp/parallel.hpp"

namespace qgp {

void CouplingMetric::validate() const { assembled(); }

FiniteMetricSpace CouplingMetric::assembled() const {
    const int nx = x.size(), ny = y.size();
    require(cross.rows() == nx && cross.cols() == ny, ErrorKind::Structural, "coupling: cross matrix has wrong shape");
    RMatrix m(nx + ny, nx + ny);
    m.topLeftCorner(nx, nx) = x.dist();
    m.bottomRightCorner(ny, ny) = y.dist();
    m.topRightCorner(nx, ny) = cross;
    m.bottomLeftCorner(ny, nx) = cross.transpose();
    return FiniteMetricSpace(m, true);
}

double CouplingMetric::hausdorff() const {
    double h = 0.0;
    for (Eigen::Index i = 0; i < cross.rows(); ++i) h = std::max(h, cross.row(i).minCoeff());
    for (Eigen::Index j = 0; j < cross.cols(); ++j) h = std::max(h, cross.col(j).minCoeff());
    return h;
}

ClassicalBridge classical_bridge(const CouplingMetric& c, double eps) {
    c.validate();
    ClassicalBridge out;
    out.delta = c.hausdorff();
    out.epsilon = eps >= 0.0 ? eps : 1e-3 * (out.delta + std::max(c.x.diameter(), c.y.diameter()));
    require(std::isfinite(out.epsilon), ErrorKind::Domain, "classical bridge: epsilon must be finite");
    const double cut = out.delta + 2.0 * out.epsilon;
    // the guard keeps pairs sitting exactly at the threshold after rounding
    const double guard = 1e-12 * std::max(1.0, cut);
    const int nx = c.x.size(), ny = c.y.size();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            if (c.cross(i, j) <= cut + guard) out.pairs.emplace_back(i, j);
    std::vector<bool> hit_x(static_cast<size_t>(nx), false), hit_y(static_cast<size_t>(ny), false);
    for (const auto& [i, j] : out.pairs) hit_x[static_cast<size_t>(i)] = hit_y[static_cast<size_t>(j)] = true;
    for (int i = 0; i < nx; ++i)
        require(hit_x[static_cast<size_t>(i)], ErrorKind::Domain,
                "classical bridge: point " + std::to_string(i) + " of X has no partner within delta + 2 epsilon");
    for (int j = 0; j < ny; ++j)
        require(hit_y[static_cast<size_t>(j)], ErrorKind::Domain,
                "classical bridge: point " + std::to_string(j) + " of Y has no partner within delta + 2 epsilon");

    const int nz = static_cast<int>(out.pairs.size());
    const Algebra d = Algebra::commutative(nz);
    std::vector<std::vector<int>> mx(static_cast<size_t>(nz), std::vector<int>(static_cast<size_t>(nx), 0));
    std::vector<std::vector<int>> my(static_cast<size_t>(nz), std::vector<int>(static_cast<size_t>(ny), 0));
    for (int t = 0; t < nz; ++t) {
        mx[static_cast<size_t>(t)][static_cast<size_t>(out.pairs[static_cast<size_t>(t)].first)] = 1;
        my[static_cast<size_t>(t)][static_cast<size_t>(out.pairs[static_cast<size_t>(t)].second)] = 1;
    }
    out.bridge = std::make_shared<const Bridge>(d, Element::unit(d), Morphism(Algebra::commutative(nx), d, mx),
                                                Morphism(Algebra::commutative(ny), d, my));
    out.lx = std::make_shared<const LipNorm>(LipNorm::finite_lipschitz(c.x));
    out.ly = std::make_shared<const LipNorm>(LipNorm::finite_lipschitz(c.y));
    return out;
}

Bridge diameter_bridge(const Algebra& a, const Algebra& b) {
    std::vector<int> dims;
    for (int i = 0; i < a.block_count(); ++i)
        for (int j = 0; j < b.block_count(); ++j) dims.push_back(a.dim(i) * b.dim(j));
    const Algebra d(dims);
    const int nt = d.block_count();
    std::vector<std::vector<int>> ma(static_cast<size_t>(nt), std::vector<int>(static_cast<size_t>(a.block_count()), 0));
    std::vector<std::vector<int>> mb(static_cast<size_t>(nt), std::vector<int>(static_cast<size_t>(b.block_count()), 0));
    std::vector<CMatrix> ub;
    for (int i = 0; i < a.block_count(); ++i)
        for (int j = 0; j < b.block_count(); ++j) {
            const int t = i * b.block_count() + j;
            const int p = a.dim(i), q = b.dim(j);
            // pi_A gives 1_q ⊗ a_i, pi_B gives b_j ⊗ 1_p after the shuffle below
            ma[static_cast<size_t>(t)][static_cast<size_t>(i)] = q;
            mb[static_cast<size_t>(t)][static_cast<size_t>(j)] = p;
            CMatrix u = CMatrix::Zero(p * q, p * q);
            for (int r = 0; r < p; ++r)
                for (int s = 0; s < q; ++s) u(s * p + r, r * q + s) = 1.0;
            ub.push_back(std::move(u));
        }
    return Bridge(d, Element::unit(d), Morphism(a, d, ma), Morphism(b, d, mb, ub));
}

SumLipNorm admissible_sum_lipnorm(std::shared_ptr<const Bridge> g, std::shared_ptr<const LipNorm> la,
                                  std::shared_ptr<const LipNorm> lb, double eps, const MetricOptions& opt) {
    require(g && la && lb, ErrorKind::Structural, "sum Lip-norm: missing component");
    const CertifiedValue len = bridge_length(*g, *la, *lb, opt);
    return admissible_sum_lipnorm(std::move(g), std::move(la), std::move(lb), eps, len);
}

SumLipNorm admissible_sum_lipnorm(std::shared_ptr<const Bridge> g, std::shared_ptr<const LipNorm> la,
                                  std::shared_ptr<const LipNorm> lb, double eps, const CertifiedValue& length) {
    require(std::isfinite(eps) && eps >= 0.0, ErrorKind::Domain, "sum Lip-norm: epsilon must be finite and non-negative");
    // the certified upper bound stands in for the length, so the denominator never undercuts it
    const double denom = length.upper + eps;
    require(denom > 0.0, ErrorKind::Domain, "sum Lip-norm: bridge length + epsilon must be positive");
    SumLipNorm out;
    out.lip = std::make_shared<const LipNorm>(LipNorm::direct_sum_max(std::move(la), std::move(lb), std::move(g), denom));
    out.length = length;
    out.epsilon = eps;
    return out;
}

Element pair_element(const Algebra& sum, const Element& a, const Element& b) {
    std::vector<CMatrix> blocks = a.blocks();
    for (const auto& m : b.blocks()) blocks.push_back(m);
    return Element(sum, std::move(blocks));
}

namespace {

OneLevelSpace summand_level(const LipNorm& sum, bool first) {
    const int na = sum.la()->parent().block_count();
    OneLevelSpace v;
    for (int t = 0; t < sum.parent().block_count(); ++t) {
        const int dt = sum.parent().dim(t);
        v.basis.push_back((t < na) == first ? CMatrix(CMatrix::Identity(dt, dt)) : CMatrix(dt, 0));
    }
    return v;
}

State embed_state(const Algebra& sum, const State& phi, bool first) {
    std::vector<CMatrix> rho;
    const int na = first ? phi.parent().block_count() : sum.block_count() - phi.parent().block_count();
    for (int t = 0; t < sum.block_count(); ++t) {
        const bool mine = (t < na) == first;
        const int dt = sum.dim(t);
        if (mine) {
            const int s = first ? t : t - na;
            rho.push_back(phi.density(s));
        } else {
            rho.push_back(CMatrix::Zero(dt, dt));
        }
    }
    return State(sum, std::move(rho));
}

}  // namespace

CertifiedValue summand_hausdorff(const LipNorm& sum, const MetricOptions& opt) {
    require(sum.kind() == LipKind::DirectSumMax, ErrorKind::Unsupported, "summand Hausdorff: needs a direct-sum Lip-norm");
    // every state of A ⊕ B supported on one summand is a state of that summand, so each
    // directed distance is the height-type saddle problem with the other summand as 1-level
    const Morphism id = Morphism::identity(sum.parent());
    return cv_max(directed_height(id, summand_level(sum, false), sum, opt),
                  directed_height(id, summand_level(sum, true), sum, opt));
}

Report verify_admissibility(const SumLipNorm& s, int samples, std::uint64_t seed, const MetricOptions& opt) {
    Report rep;
    rep.name = "admissibility";
    const LipNorm& l = *s.lip;
    require(l.kind() == LipKind::DirectSumMax, ErrorKind::Unsupported, "admissibility: needs a direct-sum Lip-norm");
    const LipNorm& la = *l.la();
    const LipNorm& lb = *l.lb();
    const Bridge& g = *l.bridge();
    const Bridge inv = inverse_bridge(g);
    if (!l.kernel_pass()) rep.fail("kernel of L_eps is not the constants (dim " + std::to_string(l.kernel_dim()) + ")");

    // quotient: the best target at radius L_A(a) is a witness b with L_eps(a, b) = L_A(a)
    Rng rng(seed);
    std::uniform_real_distribution<double> scale(0.5, 2.0);
    double dev_a = 0.0, dev_b = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Element a = random_selfadjoint(la.parent(), rng, scale(rng));
        const double ra = eval_lipnorm(la, a);
        const Element b = best_target(g, lb, a, ra, opt).b;
        dev_a = std::max(dev_a, eval_lipnorm(l, pair_element(l.parent(), a, b)) - ra);
        const Element bb = random_selfadjoint(lb.parent(), rng, scale(rng));
        const double rb = eval_lipnorm(lb, bb);
        const Element aa = best_target(inv, la, bb, rb, opt).b;
        dev_b = std::max(dev_b, eval_lipnorm(l, pair_element(l.parent(), aa, bb)) - rb);
    }
    rep.metric("quotient_deviation_a", dev_a);
    rep.metric("quotient_deviation_b", dev_b);
    if (dev_a > 1e-6) rep.fail("quotient onto A deviates by " + std::to_string(dev_a));
    if (dev_b > 1e-6) rep.fail("quotient onto B deviates by " + std::to_string(dev_b));

    // canonical injections of the summand state spaces are isometries
    double iso = 0.0;
    const int pairs = std::min(samples, 5);
    bool exact_iso = true;
    for (int k = 0; k < pairs; ++k) {
        for (int side = 0; side < 2; ++side) {
            const LipNorm& c = side == 0 ? la : lb;
            const State p = random_state(c.parent(), rng), q = random_state(c.parent(), rng);
            const CertifiedValue inner = mk_distance(c, p, q, opt);
            const CertifiedValue outer =
                mk_distance(l, embed_state(l.parent(), p, side == 0), embed_state(l.parent(), q, side == 0), opt);
            exact_iso = exact_iso && inner.method != Method::Iterative && outer.method != Method::Iterative;
            iso = std::max(iso, std::abs(inner.value - outer.value));
        }
    }
    rep.metric("isometry_deviation", iso);
    const double iso_tol = exact_iso ? 1e-7 : 1e-4;
    if (iso > iso_tol) rep.fail("summand embedding is not isometric: deviation " + std::to_string(iso));

    const CertifiedValue haus = summand_hausdorff(l, opt);
    const double bound = 2.0 * s.length.upper + s.epsilon;
    rep.metric("hausdorff", haus.value);
    rep.metric("hausdorff_upper", haus.upper);
    rep.metric("hausdorff_bound", bound);
    if (haus.method == Method::Iterative) {
        rep.notes.push_back("Hausdorff distance is lower-bound-only; only the lower bound is compared");
        if (haus.lower > bound + 1e-6) rep.fail("summand Hausdorff lower bound exceeds 2 length + eps");
    } else if (haus.upper > bound + 1e-6) {
        rep.fail("summand Hausdorff " + std::to_string(haus.upper) + " exceeds 2 length + eps = " + std::to_string(bound));
    }
    return rep;
}

const char* length_choice_name(LengthChoice c) { return c == LengthChoice::Arc ? "arc" : "chord"; }

LengthChoice parse_length_choice(const std::string& s) {
    if (s == "arc") return LengthChoice::Arc;
    if (s == "chord") return LengthChoice::Chord;
    fail(ErrorKind::Input, "unknown length choice '" + s + "' (expected arc or chord)");
}

namespace {

// eigenvector clusters of a Hermitian matrix, split at gaps above tol
std::vector<CMatrix> eigen_clusters(const CMatrix& h, double tol) {
    const HermitianEigen e = hermitian_eigen(h);
    std::vector<CMatrix> out;
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= e.values.size(); ++i) {
        if (i == e.values.size() || e.values(i) - e.values(i - 1) > tol) {
            out.push_back(e.vectors.middleCols(start, i - start));
            start = i;
        }
    }
    return out;
}

}  // namespace

FuzzyTorus fuzzy_torus(int n, int k, LengthChoice choice) {
    require(n >= 1, ErrorKind::Domain, "fuzzy torus: n must be at least 1");
    require(n <= 16, ErrorKind::Resource, "fuzzy torus: n above 16 is outside the supported size");
    const int kk = ((k % n) + n) % n;
    const int nn = n * n;
    const double two_pi = 2.0 * std::acos(-1.0);
    auto zeta = [&](long e) { return std::polar(1.0, two_pi * static_cast<double>(((e % n) + n) % n) / n); };
    auto idx = [&](int a, int b) { return ((a % n + n) % n) * n + ((b % n + n) % n); };

    // left regular sigma-representation, sigma((a, b), (c, d)) = zeta^(k b c), so that V U = zeta^k U V
    std::vector<CMatrix> lam(static_cast<size_t>(nn));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            CMatrix m = CMatrix::Zero(nn, nn);
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) m(idx(a + c, b + d), idx(c, d)) = zeta(static_cast<long>(kk) * b * c);
            lam[static_cast<size_t>(idx(a, b))] = std::move(m);
        }

    // central group elements: the radical of the commutation bicharacter
    std::vector<int> radical;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            bool central = true;
            for (int c = 0; c < n && central; ++c)
                for (int d = 0; d < n && central; ++d) central = (static_cast<long>(kk) * (b * c - d * a)) % n == 0;
            if (central) radical.push_back(idx(a, b));
        }

    Rng rng(kDefaultSeed + 1000003ULL * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(kk));
    std::normal_distribution<double> gauss;
    auto random_hermitian = [&](const std::vector<int>& support, const CMatrix& w) {
        CMatrix h = CMatrix::Zero(w.cols(), w.cols());
        for (int g : support) {
            const Complex c(gauss(rng), gauss(rng));
            const CMatrix x = w.adjoint() * lam[static_cast<size_t>(g)] * w;
            h += c * x + std::conj(c) * x.adjoint();
        }
        return h;
    };
    std::vector<int> all(static_cast<size_t>(nn));
    std::iota(all.begin(), all.end(), 0);

    // minimal central projections, then matrix units inside each central block
    const CMatrix eye = CMatrix::Identity(nn, nn);
    const std::vector<CMatrix> centre = eigen_clusters(random_hermitian(radical, eye), 1e-6);
    std::vector<CMatrix> frames;
    std::vector<int> dims;
    for (const CMatrix& w : centre) {
        const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(w.cols()))));
        require(m * m == w.cols(), ErrorKind::Solver, "fuzzy torus: central block is not of square dimension");
        const std::vector<CMatrix> diag = eigen_clusters(random_hermitian(all, w), 1e-6);
        require(static_cast<int>(diag.size()) == m, ErrorKind::Solver, "fuzzy torus: block splitting failed");
        CMatrix x = CMatrix::Zero(w.cols(), w.cols());
        for (int g : all) x += Complex(gauss(rng), gauss(rng)) * (w.adjoint() * lam[static_cast<size_t>(g)] * w);
        CMatrix frame(nn, m * m);
        for (int i = 0; i < m; ++i) {
            const CMatrix& qi = diag[static_cast<size_t>(i)];
            require(qi.cols() == m, ErrorKind::Solver, "fuzzy torus: uneven multiplicity in a block");
            CMatrix t = CMatrix::Identity(m, m);
            if (i > 0) {
                t = diag[0].adjoint() * x * qi;
                const double s = spectral_norm(t);
                require(s > 1e-8, ErrorKind::Solver, "fuzzy torus: degenerate matrix unit");
                t /= s;
            }
            const CMatrix vi = w * (qi * t.adjoint());
            for (int q = 0; q < m; ++q) frame.col(q * m + i) = vi.col(q);
        }
        frames.push_back(std::move(frame));
        dims.push_back(m);
    }

    FuzzyTorus out;
    out.n = n;
    out.k = kk;
    out.choice = choice;
    out.algebra = Algebra(dims);
    auto to_blocks = [&](const CMatrix& x) {
        std::vector<CMatrix> bl;
        for (size_t t = 0; t < frames.size(); ++t) {
            const int m = dims[t];
            bl.push_back((frames[t].adjoint() * x * frames[t]).topLeftCorner(m, m));
        }
        return Element(out.algebra, std::move(bl));
    };
    out.u = to_blocks(lam[static_cast<size_t>(idx(1, 0))]);
    out.v = to_blocks(lam[static_cast<size_t>(idx(0, 1))]);

    // dual action of (j, l): conjugation by the diagonal character zeta^(j a + l b) on the regular space
    std::vector<ActionElement> elements;
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            if (j == 0 && l == 0) continue;
            CVector chi(nn);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) chi(idx(a, b)) = zeta(static_cast<long>(j) * a + static_cast<long>(l) * b);
            const CMatrix mg = chi.asDiagonal();
            ActionElement el;
            for (size_t i = 0; i < frames.size(); ++i) {
                size_t src = 0;
                double best = -1.0;
                for (size_t s = 0; s < frames.size(); ++s) {
                    const double w = (frames[i].adjoint() * mg * frames[s]).norm();
                    if (w > best) {
                        best = w;
                        src = s;
                    }
                }
                // the intertwiner is Y ⊗ U on copies ⊗ matrix; read U off its largest m x m block
                const int m = dims[i];
                const CMatrix gmat = frames[i].adjoint() * mg * frames[src];
                CMatrix u;
                double un = -1.0;
                for (int p = 0; p < m; ++p)
                    for (int q = 0; q < m; ++q) {
                        const CMatrix blk = gmat.block(p * m, q * m, m, m);
                        const double s = spectral_norm(blk);
                        if (s > un) {
                            un = s;
                            u = blk / s;
                        }
                    }
                el.perm.push_back(static_cast<int>(src));
                el.unitaries.push_back(u);
            }
            const double jj = std::min(j, n - j), ll = std::min(l, n - l);
            if (choice == LengthChoice::Arc) {
                el.length = std::max(two_pi * jj / n, two_pi * ll / n);
            } else {
                el.length = std::max(std::abs(zeta(j) - 1.0), std::abs(zeta(l) - 1.0));
            }
            el.label = "(" + std::to_string(j) + "," + std::to_string(l) + ")";
            // the block form must reproduce the dual action on both generators
            for (int gen = 0; gen < 2; ++gen) {
                const CMatrix& lg = lam[static_cast<size_t>(gen == 0 ? idx(1, 0) : idx(0, 1))];
                const Element want = to_blocks(mg * lg * mg.adjoint());
                const Element got = act(el, gen == 0 ? out.u : out.v);
                require(structurally_equal(want, got, 1e-9), ErrorKind::Solver, "fuzzy torus: dual action extraction failed");
            }
            elements.push_back(std::move(el));
        }
    out.lip = std::make_shared<const LipNorm>(LipNorm::ergodic_action(out.algebra, std::move(elements)));
    return out;
}

GhResult gh_bruteforce(const FiniteMetricSpace& x, const FiniteMetricSpace& y, int size_limit, int threads) {
    const int nx = x.size(), ny = y.size();
    require(nx <= size_limit && ny <= size_limit, ErrorKind::Resource,
            "gh: spaces of size " + std::to_string(nx) + " and " + std::to_string(ny) + " exceed the enumeration limit " +
                std::to_string(size_limit));
    auto count = [](int base, int exp) {
        long r = 1;
        for (int i = 0; i < exp; ++i) r *= base;
        return r;
    };
    const long nf = count(ny, nx), ng = count(nx, ny);
    auto decode = [](long code, int len, int base) {
        std::vector<int> v(static_cast<size_t>(len));
        for (int i = len - 1; i >= 0; --i) {
            v[static_cast<size_t>(i)] = static_cast<int>(code % base);
            code /= base;
        }
        return v;
    };
    std::vector<std::vector<int>> fs, gs;
    std::vector<double> disf, disg;
    for (long c = 0; c < nf; ++c) {
        fs.push_back(decode(c, nx, ny));
        double d = 0.0;
        for (int i = 0; i < nx; ++i)
            for (int j = i + 1; j < nx; ++j)
                d = std::max(d, std::abs(x(i, j) - y(fs.back()[static_cast<size_t>(i)], fs.back()[static_cast<size_t>(j)])));
        disf.push_back(d);
    }
    for (long c = 0; c < ng; ++c) {
        gs.push_back(decode(c, ny, nx));
        double d = 0.0;
        for (int i = 0; i < ny; ++i)
            for (int j = i + 1; j < ny; ++j)
                d = std::max(d, std::abs(y(i, j) - x(gs.back()[static_cast<size_t>(i)], gs.back()[static_cast<size_t>(j)])));
        disg.push_back(d);
    }

    // every correspondence contains graph(f) ∪ graph(g)^T and distortion is monotone, so these suffice;
    // the work is split by the image of the first point of X and merged in enumeration order
    struct Best {
        double dis = kInf;
        long f = -1, g = -1;
    };
    const int parts = ny;
    const long per = nf / ny;
    std::vector<Best> best(static_cast<size_t>(parts));
    parallel_for(parts, threads, [&](int p) {
        Best& b = best[static_cast<size_t>(p)];
        for (long fi = p * per; fi < (p + 1) * per; ++fi) {
            const auto& f = fs[static_cast<size_t>(fi)];
            if (disf[static_cast<size_t>(fi)] >= b.dis) continue;
            for (long gi = 0; gi < ng; ++gi) {
                double d = std::max(disf[static_cast<size_t>(fi)], disg[static_cast<size_t>(gi)]);
                if (d >= b.dis) continue;
                const auto& g = gs[static_cast<size_t>(gi)];
                for (int i = 0; i < nx && d < b.dis; ++i)
                    for (int j = 0; j < ny; ++j)
                        d = std::max(d, std::abs(x(i, g[static_cast<size_t>(j)]) - y(f[static_cast<size_t>(i)], j)));
                if (d < b.dis) b = Best{d, fi, gi};
            }
        }
    });
    Best win;
    for (const auto& b : best)
        if (b.dis < win.dis) win = b;

    GhResult out;
    out.value = 0.5 * win.dis;
    const auto& f = fs[static_cast<size_t>(win.f)];
    const auto& g = gs[static_cast<size_t>(win.g)];
    for (int i = 0; i < nx; ++i) out.correspondence.emplace_back(i, f[static_cast<size_t>(i)]);
    for (int j = 0; j < ny; ++j) out.correspondence.emplace_back(g[static_cast<size_t>(j)], j);
    std::sort(out.correspondence.begin(), out.correspondence.end());
    out.correspondence.erase(std::unique(out.correspondence.begin(), out.correspondence.end()), out.correspondence.end());

    // tight extension: cross(x, y) = min over (x', y') in R of d_X(x, x') + dis/2 + d_Y(y', y)
    out.coupling.x = x;
    out.coupling.y = y;
    out.coupling.cross = RMatrix::Constant(nx, ny, kInf);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (const auto& [p, q] : out.correspondence)
                out.coupling.cross(i, j) = std::min(out.coupling.cross(i, j), x(i, p) + out.value + y(q, j));
    return out;
}

}  // namespace qgp
