#include "phdmd/ph_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "phdmd/error.hpp"

namespace phdmd {

namespace {

std::string shape(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

double magnitude(const Matrix& a) {
  return a.size() == 0 ? 1.0 : std::max(1.0, a.cwiseAbs().maxCoeff());
}

}  // namespace

Matrix PHSystem::dissipation_block() const {
  const auto n = state_dim();
  const auto m = port_dim();
  Matrix w(n + m, n + m);
  w << R, P, P.transpose(), S;
  return w;
}

PHSystem make_ph_system(Matrix H, Matrix J, Matrix R, Matrix G) {
  const auto n = H.rows();
  const auto m = G.cols();
  PHSystem sys{std::move(H), std::move(J), std::move(R), std::move(G),
               Matrix::Zero(n, m), Matrix::Zero(m, m), Matrix::Zero(m, m)};
  return sys;
}

std::vector<std::string> validate(const PHSystem& sys, double tol) {
  std::vector<std::string> issues;
  const auto n = sys.H.rows();
  const auto m = sys.G.cols();

  auto expect = [&](const Matrix& a, Eigen::Index r, Eigen::Index c, const char* name) {
    if (a.rows() != r || a.cols() != c) {
      issues.push_back(std::string(name) + " has shape " + shape(a) + ", expected " +
                       std::to_string(r) + "x" + std::to_string(c));
      return false;
    }
    return true;
  };
  bool dims_ok = expect(sys.H, n, n, "H");
  dims_ok &= expect(sys.J, n, n, "J");
  dims_ok &= expect(sys.R, n, n, "R");
  dims_ok &= expect(sys.G, n, m, "G");
  dims_ok &= expect(sys.P, n, m, "P");
  dims_ok &= expect(sys.S, m, m, "S");
  dims_ok &= expect(sys.N, m, m, "N");
  if (!dims_ok) return issues;

  const std::pair<const Matrix*, const char*> blocks[] = {
      {&sys.H, "H"}, {&sys.J, "J"}, {&sys.R, "R"}, {&sys.G, "G"},
      {&sys.P, "P"}, {&sys.S, "S"}, {&sys.N, "N"}};
  for (const auto& [a, name] : blocks) {
    if (!a->allFinite()) issues.push_back(std::string(name) + " has non-finite entries");
  }
  if (!issues.empty()) return issues;

  if (linalg::symmetry_defect(sys.H) > tol * magnitude(sys.H)) {
    issues.emplace_back("H not symmetric");
  }
  if (n > 0) {
    Eigen::LLT<Matrix> llt(linalg::sym(sys.H));
    if (llt.info() != Eigen::Success || linalg::min_sym_eigenvalue(sys.H) <= 0.0) {
      issues.emplace_back("H not SPD");
    }
  }
  if (linalg::skew_defect(sys.J) > tol * magnitude(sys.J)) {
    issues.emplace_back("J not skew-symmetric");
  }
  if (linalg::skew_defect(sys.N) > tol * magnitude(sys.N)) {
    issues.emplace_back("N not skew-symmetric");
  }
  const Matrix w = sys.dissipation_block();
  if (linalg::symmetry_defect(w) > tol * magnitude(w)) {
    issues.emplace_back("W not symmetric");
  }
  if (w.size() > 0 && linalg::min_sym_eigenvalue(w) < -tol * magnitude(w)) {
    issues.emplace_back("W not PSD");
  }
  return issues;
}

LTISystem to_lti(const PHSystem& sys) {
  const auto n = sys.state_dim();
  LTISystem lti;
  if (n == 0) {
    lti.A.resize(0, 0);
    lti.B.resize(0, sys.port_dim());
    lti.C.resize(sys.port_dim(), 0);
    lti.D = sys.S - sys.N;
    return lti;
  }
  Eigen::PartialPivLU<Matrix> lu(sys.H);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    fail(ErrorKind::Numerical,
         "to_lti: H is singular to working precision (rcond=" + std::to_string(rcond) + ")");
  }
  lti.A = lu.solve(sys.J - sys.R);
  lti.B = lu.solve(sys.G - sys.P);
  lti.C = (sys.G + sys.P).transpose();
  lti.D = sys.S - sys.N;
  return lti;
}

double max_real_eigenvalue(const Matrix& a) {
  require(a.rows() == a.cols(), "max_real_eigenvalue: matrix must be square");
  if (a.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "eigenvalue computation failed");
  return es.eigenvalues().real().maxCoeff();
}

double spectral_radius(const Matrix& a) {
  require(a.rows() == a.cols(), "spectral_radius: matrix must be square");
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "eigenvalue computation failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

PHSystem msd_builder(int n_masses, double mass, double stiffness, double damping, int n_ports) {
  require(n_masses >= 1, "msd_builder: n_masses must be >= 1");
  require(mass > 0.0, "msd_builder: mass must be positive");
  require(stiffness > 0.0, "msd_builder: stiffness must be positive");
  require(damping >= 0.0, "msd_builder: damping must be non-negative");
  require(n_ports == 1 || n_ports == 2, "msd_builder: n_ports must be 1 or 2");
  require(n_ports == 1 || n_masses >= 2, "msd_builder: two ports need at least two masses");

  const int nm = n_masses;
  const int n = 2 * nm;

  // Stiffness matrix: spring i joins mass i and mass i+1, the last one the wall.
  Matrix k = Matrix::Zero(nm, nm);
  for (int i = 0; i < nm; ++i) {
    k(i, i) += stiffness;
    if (i + 1 < nm) {
      k(i + 1, i + 1) += stiffness;
      k(i, i + 1) -= stiffness;
      k(i + 1, i) -= stiffness;
    }
  }

  // Q is the energy Hessian in canonical (position, momentum) coordinates;
  // the Hessian-form blocks follow as Q Jc Q, Q Rc Q and Q Gc.
  Matrix q = Matrix::Zero(n, n);
  Matrix jc = Matrix::Zero(n, n);
  Matrix rc = Matrix::Zero(n, n);
  for (int i = 0; i < nm; ++i) {
    for (int j = 0; j < nm; ++j) q(2 * i, 2 * j) = k(i, j);
    q(2 * i + 1, 2 * i + 1) = 1.0 / mass;
    jc(2 * i, 2 * i + 1) = 1.0;
    jc(2 * i + 1, 2 * i) = -1.0;
    rc(2 * i + 1, 2 * i + 1) = damping;
  }
  Matrix gc = Matrix::Zero(n, n_ports);
  gc(1, 0) = 1.0;
  if (n_ports == 2) gc(3, 1) = 1.0;

  Matrix hq = q;
  Matrix jh = q * jc * q;
  Matrix rh = q * rc * q;
  return make_ph_system(std::move(hq), 0.5 * (jh - jh.transpose()), 0.5 * (rh + rh.transpose()),
                        q * gc);
}

}  // namespace phdmd
