#include "phdmd/solver.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include <json.hpp>

#include "phdmd/error.hpp"
#include "phdmd/linalg.hpp"

namespace phdmd {

void check_options(const SolverOptions& opts) {
  require(opts.epsilon > 0.0, "solver: epsilon must be positive");
  require(opts.max_iters >= 0, "solver: max_iters must be non-negative");
  require(opts.alpha1 > 0.0 && opts.alpha1 < 1.0, "solver: alpha1 must lie in (0, 1)");
  require(opts.shrink > 0.0 && opts.shrink < 1.0, "solver: shrink must lie in (0, 1)");
  require(opts.max_halvings >= 0, "solver: max_halvings must be non-negative");
  require(opts.armijo > 0.0 && opts.armijo < 1.0, "solver: armijo must lie in (0, 1)");
  require(opts.truncation_tol >= 0.0, "solver: truncation_tol must be non-negative");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIters: return "max_iters";
    case Termination::Stalled: return "stalled";
  }
  return "unknown";
}

std::string to_json(const SolverReport& report) {
  nlohmann::json j;
  j["iterations"] = report.iterations;
  j["termination"] = to_string(report.termination);
  j["restarts"] = report.restarts;
  j["lipschitz"] = report.lipschitz;
  j["q"] = report.q;
  j["rank_T"] = report.rank_T;
  auto& hist = j["history"] = nlohmann::json::array();
  for (std::size_t k = 0; k < report.history.size(); ++k) {
    const auto& h = report.history[k];
    hist.push_back({{"iteration", k}, {"f", h.f}, {"f_T", h.f_T}, {"step", h.step},
                    {"restart", h.restart}});
  }
  return j.dump(2);
}

Matrix grad_psd_part(const Matrix& Q, const Matrix& T, const Matrix& Z2) {
  require(Q.rows() == Q.cols() && Q.cols() == T.rows() && Z2.rows() == T.rows() &&
              Z2.cols() == T.cols(),
          "grad_psd_part: Q must be n x n and Z2, T n x M");
  return (Q * T - Z2) * T.transpose();
}

double stopping_metric(const JRPair& prev, const JRPair& next) {
  auto term = [](const Matrix& a, const Matrix& b) {
    const double delta = (b - a).norm();
    const double denom = b.norm();
    if (denom > 0.0) return delta / denom;
    return delta;
  };
  return term(prev.J, next.J) + term(prev.R, next.R);
}

namespace {

// Objective pieces with everything that depends on (Z, T) alone precomputed.
// With T = U S V^T the residual splits orthogonally along range(V):
//   ||Z - A T||^2 = ||Z V - A U S||^2 + ||Z (I - V V^T)||^2,
// so each iteration only touches n x rank matrices.
class Problem {
 public:
  Problem(const Matrix& Z, const Matrix& T, double tol)
      : skew_(T, tol), ttt_(T * T.transpose()), ztt_(Z * T.transpose()) {
    const auto& svd = skew_.svd();
    z_w1_ = Z * svd.V;
    us_ = svd.U * svd.S.asDiagonal();
    const Matrix off = Z - z_w1_ * svd.V.transpose();
    off_f2_ = off.squaredNorm();
    off_ft2_ = (svd.S.asDiagonal() * (svd.U.transpose() * off)).squaredNorm();
    z_norm_ = Z.norm();
    zt_norm_ = std::sqrt((svd.S.asDiagonal() * (svd.U.transpose() * Z)).squaredNorm());
  }

  const linalg::SkinnySVD& svd() const { return skew_.svd(); }

  // Best skew J for fixed R: skew Procrustes on Z + R T.
  Matrix best_j(const Matrix& R) const { return skew_.solve_projected(z_w1_ + R * us_); }

  // Derivative of 1/2 ||Z - (J - R) T||^2 with respect to R.
  Matrix gradient(const Matrix& J, const Matrix& R) const { return (R - J) * ttt_ + ztt_; }

  // Absolute (f, f_T).
  std::pair<double, double> objectives(const Matrix& J, const Matrix& R) const {
    const Matrix e = z_w1_ - (J - R) * us_;
    const double f2 = e.squaredNorm() + off_f2_;
    const double ft2 = (svd().S.asDiagonal() * (svd().U.transpose() * e)).squaredNorm() + off_ft2_;
    return {std::sqrt(f2), std::sqrt(ft2)};
  }

  double rel(double value, double denom) const { return denom > 0.0 ? value / denom : value; }
  double z_norm() const { return z_norm_; }
  double zt_norm() const { return zt_norm_; }

 private:
  SkewProcrustes skew_;
  Matrix ttt_;
  Matrix ztt_;
  Matrix z_w1_;
  Matrix us_;
  double off_f2_ = 0.0;
  double off_ft2_ = 0.0;
  double z_norm_ = 0.0;
  double zt_norm_ = 0.0;
};

struct Iterate {
  JRPair pair;
  double f = 0.0;  // absolute unweighted residual
  double f_T = 0.0;
};

Iterate make_iterate(const Problem& prob, Matrix R) {
  Iterate it;
  it.pair.J = prob.best_j(R);
  it.pair.R = std::move(R);
  std::tie(it.f, it.f_T) = prob.objectives(it.pair.J, it.pair.R);
  return it;
}

}  // namespace

SolverResult solve_phdmd(const Matrix& Z, const Matrix& T, const Matrix& R0,
                         const SolverOptions& opts) {
  check_options(opts);
  const auto n = T.rows();
  require(Z.rows() == n && Z.cols() == T.cols(), "solve_phdmd: Z and T must have the same shape");
  require(R0.rows() == n && R0.cols() == n,
          "solve_phdmd: R0 must be " + std::to_string(n) + "x" + std::to_string(n));
  require(linalg::all_finite(Z) && linalg::all_finite(T) && linalg::all_finite(R0),
          "solve_phdmd: non-finite input data");
  const double r0_scale = std::max(1.0, n ? R0.cwiseAbs().maxCoeff() : 0.0);
  require(linalg::symmetry_defect(R0) <= 1e-10 * r0_scale, "solve_phdmd: R0 is not symmetric");
  require(n == 0 || linalg::min_sym_eigenvalue(R0) >= -1e-10 * r0_scale,
          "solve_phdmd: R0 is not positive semidefinite");

  const Problem prob(Z, T, opts.truncation_tol);
  const auto& svd = prob.svd();

  SolverResult out;
  SolverReport& rep = out.report;
  rep.rank_T = svd.rank;
  if (svd.rank > 0) {
    rep.lipschitz = svd.S[0] * svd.S[0];
    rep.q = svd.S[svd.rank - 1] * svd.S[svd.rank - 1] / rep.lipschitz;
  }

  auto record = [&](const Iterate& it, double step, bool restart) {
    rep.history.push_back({prob.rel(it.f, prob.z_norm()), prob.rel(it.f_T, prob.zt_norm()), step,
                           restart});
  };

  Iterate cur = make_iterate(prob, linalg::psd_project(R0));
  record(cur, 0.0, false);

  if (svd.rank == 0) {
    // No data directions: J = 0, any R is optimal; keep R0.
    rep.termination = Termination::Converged;
    out.pair = cur.pair;
    return out;
  }

  const double inv_l = 1.0 / rep.lipschitz;
  // Round-off level of the residual norm, so ties from cancellation do not
  // count as increases.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * prob.z_norm();
  Matrix Q = cur.pair.R;
  double alpha = opts.alpha1;
  rep.termination = Termination::MaxIters;

  for (int k = 1; k <= opts.max_iters; ++k) {
    // J(R_k) is cur.pair.J; gradient at the extrapolated point Q.
    const Matrix grad = prob.gradient(cur.pair.J, Q);
    Iterate next = make_iterate(prob, linalg::psd_project(Q - inv_l * grad));
    bool restarted = false;

    if (opts.restart && next.f > cur.f * (1.0 + 1e-12) + noise) {
      // Safeguard: drop momentum, projected gradient step from R_k with
      // backtracking on phi(R) = 1/2 min_J ||Z - (J - R) T||^2.
      restarted = true;
      ++rep.restarts;
      const Matrix g = prob.gradient(cur.pair.J, cur.pair.R);
      const double phi0 = 0.5 * cur.f * cur.f;
      double t = inv_l;
      bool accepted = false;
      for (int h = 0; h <= opts.max_halvings; ++h, t *= opts.shrink) {
        Iterate trial = make_iterate(prob, linalg::psd_project(cur.pair.R - t * g));
        const double decrease = (g.array() * (cur.pair.R - trial.pair.R).array()).sum();
        if (0.5 * trial.f * trial.f <= phi0 - opts.armijo * decrease &&
            trial.f <= cur.f * (1.0 + 1e-12) + noise) {
          next = std::move(trial);
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        rep.termination = Termination::Stalled;
        break;
      }
      alpha = opts.alpha1;
      Q = next.pair.R;
    } else {
      const double a2 = alpha * alpha;
      const double d = rep.q - a2;
      const double alpha_next = 0.5 * (d + std::sqrt(d * d + 4.0 * a2));
      const double beta = alpha * (1.0 - alpha) / (a2 + alpha_next);
      Q = next.pair.R + beta * (next.pair.R - cur.pair.R);
      alpha = alpha_next;
    }

    const double step = stopping_metric(cur.pair, next.pair);
    cur = std::move(next);
    rep.iterations = k;
    record(cur, step, restarted);
    if (step <= opts.epsilon) {
      rep.termination = Termination::Converged;
      break;
    }
  }

  out.pair = std::move(cur.pair);
  return out;
}

SolverResult solve_phdmd(const DataMatrices& data, const Matrix& R0, const SolverOptions& opts) {
  return solve_phdmd(data.Z, data.T, R0, opts);
}

SolverResult solve_phdmd(const DataMatrices& data, const SolverOptions& opts) {
  check_options(opts);
  const JRPair init = init_rank_deficient(data.Z, data.T, opts.truncation_tol);
  return solve_phdmd(data.Z, data.T, init.R, opts);
}

PHSystem to_ph_system(const DataMatrices& data, const JRPair& pair) {
  const auto r = data.reduced_dim;
  const auto m = data.port_dim;
  require(pair.J.rows() == r + m && pair.J.cols() == r + m && pair.R.rows() == r + m &&
              pair.R.cols() == r + m,
          "to_ph_system: J and R must be " + std::to_string(r + m) + "x" + std::to_string(r + m));
  require(data.H_reduced.rows() == r && data.H_reduced.cols() == r,
          "to_ph_system: energy matrix does not match the reduced dimension");
  const Matrix j = linalg::skew(pair.J);
  const Matrix w = linalg::sym(pair.R);
  PHSystem sys;
  sys.H = linalg::sym(data.H_reduced);
  sys.J = j.topLeftCorner(r, r);
  sys.G = j.topRightCorner(r, m);
  sys.N = j.bottomRightCorner(m, m);
  sys.R = w.topLeftCorner(r, r);
  sys.P = w.topRightCorner(r, m);
  sys.S = w.bottomRightCorner(m, m);
  return sys;
}

}  // namespace phdmd
