#include "qgp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qgp {

namespace {

double off_diagonal_norm(const CMatrix& a) {
    double s = 0.0;
    const auto n = a.rows();
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return std::sqrt(2.0 * s);
}

}  // namespace

HermitianEigen hermitian_eigen(const CMatrix& h, double threshold) {
    const auto n = h.rows();
    CMatrix a = 0.5 * (h + h.adjoint());
    CMatrix v = CMatrix::Identity(n, n);
    HermitianEigen out;

    const double scale = std::max(a.norm(), 1e-300);
    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    // threshold is relative to the Frobenius norm; one polishing sweep follows.
    bool polished = false;
    for (; sweep < kMaxSweeps; ++sweep) {
        const double off = off_diagonal_norm(a);
        if (off <= threshold * scale) {
            if (polished || off == 0.0) break;
            polished = true;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Complex c = a(p, q);
                const double mag = std::abs(c);
                if (mag <= 1e-300) continue;
                const Complex phase = c / mag;  // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;
                // G restricted to (p,q): [[cs, sn], [-sn conj(phase), cs conj(phase)]]
                const Complex gpp = cs;
                const Complex gpq = sn;
                const Complex gqp = -sn * std::conj(phase);
                const Complex gqq = cs * std::conj(phase);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
            }
        }
    }
    out.sweeps = sweep;

    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = a(order[static_cast<size_t>(i)], order[static_cast<size_t>(i)]).real();
        out.vectors.col(i) = v.col(order[static_cast<size_t>(i)]);
    }
    return out;
}

SymmetricEigen symmetric_eigen(const RMatrix& s, double threshold) {
    HermitianEigen he = hermitian_eigen(s.cast<Complex>(), threshold);
    SymmetricEigen out;
    out.values = he.values;
    // A real symmetric input keeps every rotation phase at +-1, so vectors stay real.
    out.vectors = he.vectors.real();
    return out;
}

bool is_hermitian(const CMatrix& x, double tol) {
    return x.rows() == x.cols() && max_abs_entry(x - x.adjoint()) <= tol;
}

bool is_unitary(const CMatrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return max_abs_entry(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())) <= tol;
}

double max_abs_entry(const CMatrix& x) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x.data()[i]));
    return m;
}

double spectral_norm(const CMatrix& x) {
    if (x.size() == 0) return 0.0;
    if (x.rows() == 1 && x.cols() == 1) return std::abs(x(0, 0));
    if (is_hermitian(x, 0.0)) {
        const HermitianEigen e = hermitian_eigen(x);
        return std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
    }
    const HermitianEigen e = hermitian_eigen(x.adjoint() * x);
    return std::sqrt(std::max(0.0, e.values(e.values.size() - 1)));
}

SingularPair top_singular_pair(const CMatrix& x) {
    SingularPair sp;
    const HermitianEigen e = hermitian_eigen(x.adjoint() * x);
    const auto n = e.values.size();
    sp.v = e.vectors.col(n - 1);
    const CVector xv = x * sp.v;
    sp.sigma = xv.norm();
    if (sp.sigma > 1e-300) {
        sp.u = xv / sp.sigma;
    } else {
        sp.u = CVector::Zero(x.rows());
        sp.u(0) = 1.0;
    }
    return sp;
}

RMatrix real_null_space(const RMatrix& m, double tol) {
    const Eigen::Index c = m.cols();
    if (c == 0) return RMatrix(0, 0);
    if (m.rows() == 0) return RMatrix::Identity(c, c);
    Eigen::JacobiSVD<RMatrix> svd(m, Eigen::ComputeFullV);
    const RVector& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double cut = smax > 1.0 ? tol * smax : tol;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    return svd.matrixV().rightCols(c - rank);
}

int real_rank(const RMatrix& m, double tol) {
    return static_cast<int>(m.cols() - real_null_space(m, tol).cols());
}

CMatrix complex_null_space(const CMatrix& m, double tol) {
    const Eigen::Index c = m.cols();
    if (m.rows() == 0) return CMatrix::Identity(c, c);
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const RVector& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    return svd.matrixV().rightCols(c - rank);
}

}  // namespace qgp
