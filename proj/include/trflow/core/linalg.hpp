#pragma once
// Small dense linear algebra on bounded-size Eigen types. Real ambient
// dimension is 2n with n <= 3, so every matrix fits in 6x6 stack storage.

#include <complex>

#include <Eigen/Dense>

namespace trflow {

inline constexpr int kMaxReal = 6;
inline constexpr int kMaxComplex = 3;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxReal, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxReal, kMaxReal>;
using cplx = std::complex<double>;
using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxComplex, 1>;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxComplex, kMaxComplex>;

// Standard complex structure on R^{2n} in (x1,y1,...,xn,yn) order:
// J d/dx_k = d/dy_k.
Mat standard_j(int n);
// Standard symplectic matrix: omega(X,Y) = X^T Omega Y with omega = sum dx^dy.
Mat standard_omega(int n);

// (x1,y1,...) <-> (x1 + i y1, ...).
CVec to_complex(const Vec& v);
Vec to_real(const CVec& z);
// Columns of a 2n x k real matrix as complex n-vectors.
CMat to_complex_columns(const Mat& m);

cplx complex_det(const CMat& m);

// Unitary factor U of the polar decomposition M = P U (P Hermitian >= 0),
// computed from the SVD.
CMat polar_unitary(const CMat& m);

// Symmetric positive-definite square root and its inverse.
Mat spd_sqrt(const Mat& a);
Mat spd_inv_sqrt(const Mat& a);

// Gram-Schmidt on the columns of `cols` with respect to the inner product
// X^T G Y, in column order. Throws DegenerateError on a vanishing column.
Mat gram_schmidt(const Mat& cols, const Mat& g);

double max_abs(const Mat& m);

}  // namespace trflow
