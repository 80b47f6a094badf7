#include "phdmd/procrustes.hpp"

#include <cmath>
#include <string>

#include "phdmd/error.hpp"

namespace phdmd {

namespace {

void require_same_shape(const Matrix& Z, const Matrix& T, const char* op) {
  require(Z.rows() == T.rows() && Z.cols() == T.cols(),
          std::string(op) + ": Z is " + std::to_string(Z.rows()) + "x" + std::to_string(Z.cols()) +
              " but T is " + std::to_string(T.rows()) + "x" + std::to_string(T.cols()));
}

// Weighted-problem data in SVD coordinates: Zt1 = S V1^T Z W1.
struct WeightedCoords {
  linalg::SkinnySVD svd;
  Matrix z_w1;  // Z W1
  Matrix zt1;
};

WeightedCoords weighted_coords(const Matrix& Z, const Matrix& T, double tol) {
  WeightedCoords c;
  c.svd = linalg::skinny_svd(T, tol);
  c.z_w1 = Z * c.svd.V;
  c.zt1 = c.svd.S.asDiagonal() * (c.svd.U.transpose() * c.z_w1);
  return c;
}

}  // namespace

JRPair split_skew_psd(const Matrix& Z) {
  return {linalg::skew(Z), linalg::psd_project(-Z)};
}

SkewProcrustes::SkewProcrustes(const Matrix& T, double truncation_tol)
    : dim_(T.rows()), svd_(linalg::skinny_svd(T, truncation_tol)) {
  const auto r = svd_.rank;
  hadamard_.resize(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      hadamard_(i, j) = 1.0 / (svd_.S[i] * svd_.S[i] + svd_.S[j] * svd_.S[j]);
    }
  }
}

Matrix SkewProcrustes::solve(const Matrix& Z1) const {
  require(Z1.rows() == dim_ && Z1.cols() == svd_.V.rows(),
          "solve_skew_procrustes: Z1 is " + std::to_string(Z1.rows()) + "x" +
              std::to_string(Z1.cols()) + " but T is " + std::to_string(dim_) + "x" +
              std::to_string(svd_.V.rows()));
  return solve_projected(Z1 * svd_.V);
}

Matrix SkewProcrustes::solve_projected(const Matrix& z1_w1) const {
  const auto r = svd_.rank;
  require(z1_w1.rows() == dim_ && z1_w1.cols() == r,
          "SkewProcrustes::solve_projected: expected a " + std::to_string(dim_) + "x" +
              std::to_string(r) + " matrix");
  if (r == 0) return Matrix::Zero(dim_, dim_);

  const Matrix& v1 = svd_.U;
  const Vector& s = svd_.S;

  // Range block.
  const Matrix y11 = v1.transpose() * z1_w1;
  const Matrix ys = y11 * s.asDiagonal();
  const Matrix k11 = hadamard_.cwiseProduct(ys - ys.transpose());

  // Coupling from range(T) into its complement, matched exactly.
  const Matrix coupling = (z1_w1 - v1 * y11) * s.cwiseInverse().asDiagonal();

  Matrix j = v1 * k11 * v1.transpose();
  if (r < dim_) {
    const Matrix c = coupling * v1.transpose();
    j += c - c.transpose();
  }
  return 0.5 * (j - j.transpose());
}

Matrix solve_skew_procrustes(const Matrix& Z1, const Matrix& T, double truncation_tol) {
  require_same_shape(Z1, T, "solve_skew_procrustes");
  return SkewProcrustes(T, truncation_tol).solve(Z1);
}

JRPair weighted_minimizers(const Matrix& Z, const Matrix& T, double truncation_tol) {
  require_same_shape(Z, T, "weighted_minimizers");
  const auto n = T.rows();
  const WeightedCoords c = weighted_coords(Z, T, truncation_tol);
  if (c.svd.rank == 0) return {Matrix::Zero(n, n), Matrix::Zero(n, n)};

  // V1 S^-1 (.) S^-1 V1^T
  const Matrix back = c.svd.U * c.svd.S.cwiseInverse().asDiagonal();
  const Matrix j = back * linalg::skew(c.zt1) * back.transpose();
  const Matrix r = back * linalg::psd_project(-c.zt1) * back.transpose();
  return {0.5 * (j - j.transpose()), 0.5 * (r + r.transpose())};
}

double WeightedOptimum::value() const {
  return std::sqrt(unreachable * unreachable + lambda_plus * lambda_plus);
}

WeightedOptimum weighted_optimum(const Matrix& Z, const Matrix& T, double truncation_tol) {
  require_same_shape(Z, T, "weighted_optimum");
  const WeightedCoords c = weighted_coords(Z, T, truncation_tol);
  WeightedOptimum out;
  if (c.svd.rank == 0) return out;

  // S V1^T Z restricted to the complement of range(W1).
  const Matrix full = c.svd.S.asDiagonal() * (c.svd.U.transpose() * Z);
  out.unreachable = (full - c.zt1 * c.svd.V.transpose()).norm();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(linalg::sym(c.zt1), Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double l = eig.eigenvalues()[i];
    if (l > 0.0) acc += l * l;
  }
  out.lambda_plus = std::sqrt(acc);
  return out;
}

JRPair init_rank_deficient(const Matrix& Z, const Matrix& T, double truncation_tol) {
  require_same_shape(Z, T, "init_rank_deficient");
  JRPair pair = weighted_minimizers(Z, T, truncation_tol);
  const auto n = T.rows();
  const WeightedCoords c = weighted_coords(Z, T, truncation_tol);
  const auto r = c.svd.rank;
  if (r == 0 || r == n) return pair;

  const Matrix& v1 = c.svd.U;
  // (I - V1 V1^T) Z W1 S^-1 V1^T, i.e. the complement-to-range block of J.
  const Matrix coupling =
      (c.z_w1 - v1 * (v1.transpose() * c.z_w1)) * c.svd.S.cwiseInverse().asDiagonal();
  const Matrix block = coupling * v1.transpose();
  pair.J += block - block.transpose();
  return pair;
}

}  // namespace phdmd
