#pragma once

#include <Eigen/Dense>

namespace phdmd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative singular-value cutoff used whenever a caller does not supply one.
inline constexpr double kDefaultTruncationTol = 1e-12;

namespace linalg {

/// Rank-revealing thin SVD: A ~= U * diag(S) * V^T with only the retained
/// singular triplets kept.
struct SkinnySVD {
  Matrix U;  // rows(A) x rank, orthonormal columns
  Vector S;  // rank, strictly positive, non-increasing
  Matrix V;  // cols(A) x rank, orthonormal columns
  Eigen::Index rank = 0;

  Matrix reconstruct() const;
};

Matrix sym(const Matrix& a);
Matrix skew(const Matrix& a);

/// Nearest symmetric positive semidefinite matrix to sym(a) in the Frobenius
/// norm: eigenvalues of sym(a) are clipped at zero.
Matrix psd_project(const Matrix& a);

/// Singular values sigma_i <= tol * sigma_1 are discarded. A zero matrix has
/// rank 0.
SkinnySVD skinny_svd(const Matrix& a, double truncation_tol = kDefaultTruncationTol);

/// Moore-Penrose pseudoinverse built from the truncated skinny SVD.
Matrix pinv(const Matrix& a, double truncation_tol = kDefaultTruncationTol);
Matrix pinv(const SkinnySVD& svd);

/// sqrt(trace(A^T Omega A)) for symmetric PSD Omega. Throws if Omega has an
/// eigenvalue below -1e-10.
double weighted_fro_norm(const Matrix& a, const Matrix& omega);

/// Smallest eigenvalue of sym(a) from the symmetric eigensolver.
double min_sym_eigenvalue(const Matrix& a);

/// Largest entry of |a - a^T| (resp. |a + a^T|).
double symmetry_defect(const Matrix& a);
double skew_defect(const Matrix& a);

bool all_finite(const Matrix& a);

}  // namespace linalg
}  // namespace phdmd
