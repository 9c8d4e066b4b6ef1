#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qgp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

struct HermitianEigen {
    RVector values;   // ascending
    CMatrix vectors;  // columns are orthonormal eigenvectors
    int sweeps = 0;
};

// Cyclic Jacobi on a Hermitian matrix. Only the upper triangle is trusted;
// the input is symmetrized first.
HermitianEigen hermitian_eigen(const CMatrix& h, double threshold = 1e-12);

// Real symmetric convenience wrapper around the same Jacobi kernel.
struct SymmetricEigen {
    RVector values;
    RMatrix vectors;
};
SymmetricEigen symmetric_eigen(const RMatrix& s, double threshold = 1e-12);

// Largest singular value, via the spectrum of x*x (or of x itself when x is Hermitian).
double spectral_norm(const CMatrix& x);

// Top singular triple (sigma, u, v) with x v = sigma u.
struct SingularPair {
    double sigma = 0.0;
    CVector u;
    CVector v;
};
SingularPair top_singular_pair(const CMatrix& x);

double max_abs_entry(const CMatrix& x);
bool is_hermitian(const CMatrix& x, double tol = 1e-12);
bool is_unitary(const CMatrix& u, double tol = 1e-10);

// Orthonormal basis of the null space of a real matrix (columns), rank cutoff
// tol relative to the largest singular value (absolute when the matrix is ~0).
RMatrix real_null_space(const RMatrix& m, double tol = 1e-9);
int real_rank(const RMatrix& m, double tol = 1e-9);

// Orthonormal basis of the intersection of kernels, computed through the PSD sum m*m.
CMatrix complex_null_space(const CMatrix& m, double tol);

}  // namespace qgp
