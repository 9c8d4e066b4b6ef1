#include "qgp/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "qgp/errors.hpp"

namespace qgp {

Polytope::Polytope(RMatrix a, RVector b) : a_(std::move(a)), b_(std::move(b)) {
    require(a_.rows() == b_.size(), ErrorKind::Structural, "polytope: A and b row counts differ");
    require(a_.allFinite() && b_.allFinite(), ErrorKind::Domain, "polytope: non-finite data");
}

bool Polytope::contains(const RVector& x, double tol) const {
    if (a_.rows() == 0) return true;
    return ((a_ * x - b_).array() <= tol).all();
}

const std::vector<RVector>& Polytope::vertices(int dim_limit) const {
    if (!vertices_) vertices_ = enum_vertices(*this, dim_limit);
    return *vertices_;
}

bool lex_less(const RVector& u, const RVector& v, double tol) {
    for (Eigen::Index i = 0; i < std::min(u.size(), v.size()); ++i) {
        if (u(i) < v(i) - tol) return true;
        if (u(i) > v(i) + tol) return false;
    }
    return u.size() < v.size();
}

namespace {

using Bits = std::vector<std::uint64_t>;

struct Ray {
    RVector y;
    Bits zero;  // processed constraints tight at y
};

void set_bit(Bits& b, int i) { b[static_cast<size_t>(i) >> 6] |= (std::uint64_t{1} << (i & 63)); }

int popcount_and(const Bits& a, const Bits& b) {
    int c = 0;
    for (size_t i = 0; i < a.size(); ++i) c += __builtin_popcountll(a[i] & b[i]);
    return c;
}

bool contains_bits(const Bits& super, const Bits& sub) {
    for (size_t i = 0; i < super.size(); ++i)
        if ((sub[i] & ~super[i]) != 0) return false;
    return true;
}

Bits and_bits(const Bits& a, const Bits& b) {
    Bits r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] & b[i];
    return r;
}

}  // namespace

std::vector<RVector> enum_vertices(const Polytope& p, int dim_limit) {
    const int d = p.dim();
    require(d <= dim_limit, ErrorKind::Resource,
            "vertex enumeration: dimension " + std::to_string(d) + " exceeds the limit " + std::to_string(dim_limit));
    const RMatrix& a = p.a();
    const RVector& b = p.b();
    if (d == 0) {
        if (b.size() == 0 || b.minCoeff() >= -1e-9) return {RVector(0)};
        return {};
    }
    // cone { y in R^{d+1} : H y >= 0 }, y = (x t), rows (-A | b) and t >= 0
    const int m = static_cast<int>(a.rows()) + 1;
    RMatrix h(m, d + 1);
    h.topLeftCorner(m - 1, d) = -a;
    h.topRightCorner(m - 1, 1) = b;
    h.row(m - 1).setZero();
    h(m - 1, d) = 1.0;
    for (int i = 0; i < m; ++i) {
        const double n = h.row(i).norm();
        if (n > 0.0) h.row(i) /= n;
    }

    // greedy independent row set for the initial simplicial cone
    std::vector<int> init;
    {
        RMatrix basis(0, d + 1);
        for (int i = 0; i < m && static_cast<int>(init.size()) < d + 1; ++i) {
            RVector r = h.row(i).transpose();
            for (Eigen::Index k = 0; k < basis.rows(); ++k) r -= basis.row(k).dot(r) * basis.row(k).transpose();
            const double nr = r.norm();
            if (nr > 1e-9) {
                basis.conservativeResize(basis.rows() + 1, Eigen::NoChange);
                basis.row(basis.rows() - 1) = (r / nr).transpose();
                init.push_back(i);
            }
        }
    }
    require(static_cast<int>(init.size()) == d + 1, ErrorKind::Domain,
            "vertex enumeration: polytope is unbounded (recession directions exist)");

    const size_t words = static_cast<size_t>((m + 63) / 64);
    RMatrix hk(d + 1, d + 1);
    for (int j = 0; j <= d; ++j) hk.row(j) = h.row(init[static_cast<size_t>(j)]);
    const RMatrix hinv = hk.inverse();
    std::vector<Ray> rays;
    for (int j = 0; j <= d; ++j) {
        Ray r;
        r.y = hinv.col(j).normalized();
        r.zero.assign(words, 0);
        for (int k = 0; k <= d; ++k)
            if (k != j) set_bit(r.zero, init[static_cast<size_t>(k)]);
        rays.push_back(std::move(r));
    }

    std::vector<bool> used(static_cast<size_t>(m), false);
    for (int i : init) used[static_cast<size_t>(i)] = true;
    constexpr double eps = 1e-10;
    for (int row = 0; row < m; ++row) {
        if (used[static_cast<size_t>(row)]) continue;
        used[static_cast<size_t>(row)] = true;
        const RVector hr = h.row(row).transpose();
        std::vector<double> val(rays.size());
        std::vector<size_t> pos, neg;
        std::vector<Ray> next;
        for (size_t k = 0; k < rays.size(); ++k) {
            val[k] = hr.dot(rays[k].y);
            if (val[k] > eps) pos.push_back(k);
            else if (val[k] < -eps) neg.push_back(k);
        }
        if (neg.empty()) {
            for (size_t k = 0; k < rays.size(); ++k)
                if (std::abs(val[k]) <= eps) set_bit(rays[k].zero, row);
            continue;
        }
        for (size_t k = 0; k < rays.size(); ++k) {
            if (val[k] < -eps) continue;
            Ray r = rays[k];
            if (val[k] <= eps) set_bit(r.zero, row);
            next.push_back(std::move(r));
        }
        for (size_t ip : pos) {
            for (size_t in : neg) {
                const Bits common = and_bits(rays[ip].zero, rays[in].zero);
                if (popcount_and(common, common) < d - 1) continue;
                bool adjacent = true;
                for (size_t k = 0; k < rays.size() && adjacent; ++k) {
                    if (k == ip || k == in) continue;
                    if (contains_bits(rays[k].zero, common)) adjacent = false;
                }
                if (!adjacent) continue;
                Ray r;
                r.y = (val[ip] * rays[in].y - val[in] * rays[ip].y).normalized();
                r.zero = common;
                set_bit(r.zero, row);
                next.push_back(std::move(r));
            }
        }
        rays = std::move(next);
    }

    for (const Ray& r : rays)
        require(r.y(d) > eps, ErrorKind::Domain, "vertex enumeration: polytope is unbounded (recession directions exist)");
    std::vector<RVector> verts;
    for (const Ray& r : rays) {
        RVector x = r.y.head(d) / r.y(d);
        // polish on the tight rows of A
        std::vector<int> tight;
        for (int i = 0; i < m - 1; ++i) {
            const bool bit = (r.zero[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1u;
            if (bit) tight.push_back(i);
        }
        if (static_cast<int>(tight.size()) >= d) {
            RMatrix at(static_cast<Eigen::Index>(tight.size()), d);
            RVector bt(static_cast<Eigen::Index>(tight.size()));
            for (size_t k = 0; k < tight.size(); ++k) {
                at.row(static_cast<Eigen::Index>(k)) = a.row(tight[k]);
                bt(static_cast<Eigen::Index>(k)) = b(tight[k]);
            }
            Eigen::ColPivHouseholderQR<RMatrix> qr(at);
            if (qr.rank() == d) {
                const RVector xs = qr.solve(bt);
                if ((xs - x).lpNorm<Eigen::Infinity>() < 1e-6) x = xs;
            }
        }
        for (Eigen::Index k = 0; k < x.size(); ++k)
            if (std::abs(x(k)) < 1e-13) x(k) = 0.0;
        verts.push_back(std::move(x));
    }
    std::sort(verts.begin(), verts.end(), [](const RVector& u, const RVector& v) { return lex_less(u, v, 1e-9); });
    std::vector<RVector> out;
    for (auto& v : verts) {
        if (!out.empty() && (out.back() - v).lpNorm<Eigen::Infinity>() <= 1e-9) continue;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace qgp
