#pragma once

#include <string>
#include <vector>

#include "phdmd/linalg.hpp"

namespace phdmd {

/// Continuous-time port-Hamiltonian realization in energy-Hessian form
///
///   H x' = (J - R) x + (G - P) u
///      y = (G + P)^T x + (S - N) u
///
/// with H symmetric positive definite, J = -J^T, N = -N^T and
/// W = [[R, P], [P^T, S]] symmetric positive semidefinite.
struct PHSystem {
  Matrix H;  // n x n
  Matrix J;  // n x n
  Matrix R;  // n x n
  Matrix G;  // n x m
  Matrix P;  // n x m
  Matrix S;  // m x m
  Matrix N;  // m x m

  Eigen::Index state_dim() const { return H.rows(); }
  Eigen::Index port_dim() const { return G.cols(); }

  /// Dissipation block [[R, P], [P^T, S]].
  Matrix dissipation_block() const;
  /// Energy H(x) = x^T H x / 2.
  double energy(const Vector& x) const { return 0.5 * x.dot(H * x); }
};

/// Builds a PHSystem from its state-equation blocks; P, S and N default to zero.
PHSystem make_ph_system(Matrix H, Matrix J, Matrix R, Matrix G);

/// Standard-form state-space realization x' = A x + B u, y = C x + D u. The
/// same container carries discrete-time models (x_{k+1} = A x_k + B u_k).
struct LTISystem {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;
  bool discrete = false;
  double dt = 0.0;  // sampling period, discrete models only

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
  Eigen::Index output_dim() const { return C.rows(); }
};

/// Default tolerance for structural checks.
inline constexpr double kStructureTol = 1e-10;

/// Lists every structural violation. Empty means the system is a valid pH
/// realization. Symmetry and semidefiniteness are checked relative to
/// max(1, largest entry) of the block involved.
std::vector<std::string> validate(const PHSystem& sys, double tol = kStructureTol);

/// A = H^-1 (J - R), B = H^-1 (G - P), C = (G + P)^T, D = S - N.
LTISystem to_lti(const PHSystem& sys);

/// Largest real part over the eigenvalues of a (general) square matrix.
double max_real_eigenvalue(const Matrix& a);
/// Largest modulus over the eigenvalues of a square matrix.
double spectral_radius(const Matrix& a);

/// Chain of n_masses masses coupled by springs and dampers with the last
/// spring attached to a wall. States interleave (position, momentum) per mass;
/// port 1 forces mass 1, port 2 (optional) forces mass 2 with collocated
/// outputs.
PHSystem msd_builder(int n_masses, double mass, double stiffness, double damping, int n_ports);

}  // namespace phdmd
