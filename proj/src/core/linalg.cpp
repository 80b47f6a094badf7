#include "phdmd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phdmd/error.hpp"

namespace phdmd::linalg {

namespace {

void require_square(const Matrix& a, const char* op) {
  if (a.rows() != a.cols()) {
    fail(ErrorKind::InvalidArgument, std::string(op) + ": matrix must be square, got " +
                                         std::to_string(a.rows()) + "x" +
                                         std::to_string(a.cols()));
  }
}

}  // namespace

Matrix SkinnySVD::reconstruct() const { return U * S.asDiagonal() * V.transpose(); }

Matrix sym(const Matrix& a) {
  require_square(a, "sym");
  return 0.5 * (a + a.transpose());
}

Matrix skew(const Matrix& a) {
  require_square(a, "skew");
  return 0.5 * (a - a.transpose());
}

Matrix psd_project(const Matrix& a) {
  require_square(a, "psd_project");
  if (a.size() == 0) return a;
  const Matrix s = sym(a);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success) fail(ErrorKind::Numerical, "psd_project: eigensolver failed");

  const Vector& lambda = eig.eigenvalues();
  const double scale = lambda.cwiseAbs().maxCoeff();
  // Eigenvalues within 1e-12 of zero (relative) are treated as zero.
  const double floor = 1e-12 * scale;
  Vector clipped = lambda;
  for (Eigen::Index i = 0; i < clipped.size(); ++i) {
    if (clipped[i] <= floor && clipped[i] >= -floor) clipped[i] = 0.0;
    clipped[i] = std::max(clipped[i], 0.0);
  }
  const Matrix& q = eig.eigenvectors();
  Matrix out = q * clipped.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

SkinnySVD skinny_svd(const Matrix& a, double truncation_tol) {
  require(truncation_tol >= 0.0, "skinny_svd: truncation_tol must be non-negative");
  SkinnySVD out;
  if (a.size() == 0) {
    out.U.resize(a.rows(), 0);
    out.V.resize(a.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) fail(ErrorKind::Numerical, "skinny_svd: SVD failed");

  const Vector& s = svd.singularValues();
  const double cutoff = truncation_tol * s[0];
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > cutoff && s[rank] > 0.0) ++rank;

  out.rank = rank;
  out.S = s.head(rank);
  out.U = svd.matrixU().leftCols(rank);
  out.V = svd.matrixV().leftCols(rank);
  return out;
}

Matrix pinv(const SkinnySVD& svd) {
  return svd.V * svd.S.cwiseInverse().asDiagonal() * svd.U.transpose();
}

Matrix pinv(const Matrix& a, double truncation_tol) { return pinv(skinny_svd(a, truncation_tol)); }

double weighted_fro_norm(const Matrix& a, const Matrix& omega) {
  require_square(omega, "weighted_fro_norm");
  require(omega.rows() == a.rows(), "weighted_fro_norm: Omega is " +
                                        std::to_string(omega.rows()) + "x" +
                                        std::to_string(omega.cols()) + " but A has " +
                                        std::to_string(a.rows()) + " rows");
  if (omega.size() > 0 && min_sym_eigenvalue(omega) < -1e-10) {
    fail(ErrorKind::InvalidArgument, "weighted_fro_norm: Omega is not positive semidefinite");
  }
  const double t = (a.transpose() * omega * a).trace();
  return std::sqrt(std::max(t, 0.0));
}

double min_sym_eigenvalue(const Matrix& a) {
  require_square(a, "min_sym_eigenvalue");
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym(a), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

double symmetry_defect(const Matrix& a) {
  require_square(a, "symmetry_defect");
  if (a.size() == 0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

double skew_defect(const Matrix& a) {
  require_square(a, "skew_defect");
  if (a.size() == 0) return 0.0;
  return (a + a.transpose()).cwiseAbs().maxCoeff();
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace phdmd::linalg
