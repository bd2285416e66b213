#include "trflow/core/linalg.hpp"

#include <cmath>

#include "trflow/core/errors.hpp"

namespace trflow {

Mat standard_j(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    j(2 * k + 1, 2 * k) = 1.0;
    j(2 * k, 2 * k + 1) = -1.0;
  }
  return j;
}

Mat standard_omega(int n) { return standard_j(n).transpose(); }

CVec to_complex(const Vec& v) {
  const int n = static_cast<int>(v.size()) / 2;
  CVec z(n);
  for (int k = 0; k < n; ++k) z(k) = cplx(v(2 * k), v(2 * k + 1));
  return z;
}

Vec to_real(const CVec& z) {
  Vec v(2 * z.size());
  for (int k = 0; k < z.size(); ++k) {
    v(2 * k) = z(k).real();
    v(2 * k + 1) = z(k).imag();
  }
  return v;
}

CMat to_complex_columns(const Mat& m) {
  CMat c(m.rows() / 2, m.cols());
  for (int j = 0; j < m.cols(); ++j) c.col(j) = to_complex(m.col(j));
  return c;
}

cplx complex_det(const CMat& m) {
  switch (m.rows()) {
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    default: return m.determinant();
  }
}

CMat polar_unitary(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Mat spd_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw DegenerateError("spd_sqrt: matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Mat spd_inv_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw DegenerateError("spd_inv_sqrt: matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

Mat gram_schmidt(const Mat& cols, const Mat& g) {
  Mat e = cols;
  for (int j = 0; j < e.cols(); ++j) {
    for (int i = 0; i < j; ++i) {
      const double c = e.col(i).dot(g * e.col(j));
      e.col(j) -= c * e.col(i);
    }
    const double nrm2 = e.col(j).dot(g * e.col(j));
    if (!(nrm2 > 0.0)) throw DegenerateError("gram_schmidt: dependent frame");
    e.col(j) /= std::sqrt(nrm2);
  }
  return e;
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace trflow
