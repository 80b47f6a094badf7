#include "phdmd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <thread>
#include <type_traits>
#include <variant>

#include <json.hpp>

#include "phdmd/baselines.hpp"
#include "phdmd/error.hpp"
#include "phdmd/model_io.hpp"
#include "phdmd/trajectory_io.hpp"

namespace phdmd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

Vector initial_state(const ExperimentConfig& cfg, Eigen::Index n) {
  if (cfg.x0.empty()) return Vector::Zero(n);
  if (static_cast<Eigen::Index>(cfg.x0.size()) != n) {
    fail(ErrorKind::Config, "config: integration.x0: expected " + std::to_string(n) +
                                " entries, got " + std::to_string(cfg.x0.size()));
  }
  return Eigen::Map<const Vector>(cfg.x0.data(), n);
}

void check_ports(const InputSpec& inputs, const PHSystem& sys, const char* field) {
  if (static_cast<Eigen::Index>(inputs.size()) != sys.port_dim()) {
    fail(ErrorKind::Config, std::string("config: ") + field + ": model has " +
                                std::to_string(sys.port_dim()) + " ports but " +
                                std::to_string(inputs.size()) + " inputs are given");
  }
}

struct EigenInfo {
  double max_real = 0.0;
  double spectral_radius = 0.0;
  int unstable = 0;  // eigenvalues in the open right half-plane / outside the unit circle
};

EigenInfo eigen_info(const Matrix& a, bool discrete) {
  EigenInfo info;
  if (a.rows() == 0) return info;
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "eigenvalue computation failed");
  info.max_real = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto l = es.eigenvalues()[i];
    info.max_real = std::max(info.max_real, l.real());
    info.spectral_radius = std::max(info.spectral_radius, std::abs(l));
    if (discrete ? std::abs(l) > 1.0 + 1e-12 : l.real() > 1e-10) ++info.unstable;
  }
  return info;
}

Trajectory project(const Trajectory& traj, const std::optional<Matrix>& basis) {
  if (!basis) return traj;
  Trajectory out = traj;
  out.X = basis->transpose() * traj.X;
  return out;
}

json objective_json(const Objective& o) {
  return {{"absolute", o.absolute}, {"relative", o.relative}, {"degenerate", o.degenerate}};
}

json summary_json(const ErrorSummary& e) {
  return {{"rel_l2", e.rel_l2}, {"rel_linf", e.rel_linf}};
}

fs::path model_dir(const fs::path& out, const std::string& method) { return out / "models" / method; }

void check_method(const std::string& method) {
  if (method != "phdmd" && method != "dmd" && method != "oi") {
    fail(ErrorKind::InvalidArgument,
         "unknown method \"" + method + "\" (expected phdmd, dmd or oi)");
  }
}

PHSystem load_truth(const ExperimentConfig& cfg, const fs::path& out) {
  if (fs::exists(out / "model_true" / "manifest.json")) return load_system(out / "model_true");
  return true_system(cfg);
}

Trajectory clean_train(const PHSystem& truth, const Trajectory& train, const ExperimentConfig& cfg) {
  return simulate_midpoint(truth, train.U, initial_state(cfg, truth.state_dim()), train.dt);
}

Trajectory simulate_model(const AnyModel& model, const std::optional<Matrix>& basis,
                          const Matrix& U, const Vector& x0_full, double dt) {
  const Vector x0 = basis ? Vector(basis->transpose() * x0_full) : x0_full;
  if (const auto* ph = std::get_if<PHSystem>(&model)) {
    require(ph->state_dim() == x0.size(), "evaluate: model state dimension " +
                                              std::to_string(ph->state_dim()) +
                                              " does not match its basis/initial state " +
                                              std::to_string(x0.size()));
    return simulate_midpoint(*ph, U, x0, dt);
  }
  const auto& lti = std::get<LTISystem>(model);
  require(lti.state_dim() == x0.size(), "evaluate: model state dimension " +
                                            std::to_string(lti.state_dim()) +
                                            " does not match its basis/initial state " +
                                            std::to_string(x0.size()));
  if (lti.discrete && std::abs(lti.dt - dt) > 1e-12 * dt) {
    fail(ErrorKind::InvalidArgument, "evaluate: discrete model has sampling period " +
                                         std::to_string(lti.dt) + " but the data uses " +
                                         std::to_string(dt));
  }
  return simulate_lti(lti, U, x0, dt);
}

std::string error_csv(const Trajectory& truth, const Trajectory& model, const ErrorSummary& err) {
  std::string s = "t";
  const auto p = truth.Y.rows();
  for (Eigen::Index k = 0; k < p; ++k) s += ",y_true_" + std::to_string(k + 1);
  for (Eigen::Index k = 0; k < p; ++k) s += ",y_model_" + std::to_string(k + 1);
  s += ",abs_error\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += buf;
  };
  for (Eigen::Index i = 0; i < truth.samples(); ++i) {
    put(truth.t[i]);
    for (Eigen::Index k = 0; k < p; ++k) {
      s += ',';
      put(truth.Y(k, i));
    }
    for (Eigen::Index k = 0; k < p; ++k) {
      s += ',';
      put(model.Y(k, i));
    }
    s += ',';
    put(err.abs_error[static_cast<std::size_t>(i)]);
    s += '\n';
  }
  return s;
}

void save_identification(const Identification& id, const fs::path& dir) {
  if (const auto* ph = std::get_if<PHSystem>(&id.model)) {
    save_system(*ph, dir, id.basis);
  } else {
    save_lti(std::get<LTISystem>(id.model), dir, id.basis);
  }
  write_text(dir / "report.json", id.report_json);
}

Trajectory read_or(const fs::path& path, const std::function<Trajectory()>& make) {
  return fs::exists(path) ? read_trajectory_csv(path) : make();
}

}  // namespace

PHSystem true_system(const ExperimentConfig& cfg) {
  if (cfg.model.manifest) return load_system(*cfg.model.manifest);
  return msd_builder(cfg.model.n_masses, cfg.model.mass, cfg.model.stiffness, cfg.model.damping,
                     cfg.model.n_ports);
}

Trajectory training_trajectory(const ExperimentConfig& cfg, const PHSystem& sys) {
  check_ports(cfg.train_inputs, sys, "inputs.train");
  Trajectory traj = simulate_midpoint(sys, cfg.train_inputs, initial_state(cfg, sys.state_dim()),
                                      cfg.dt, cfg.train_steps());
  if (cfg.noise_stddev > 0.0) traj = add_noise(traj, cfg.noise_stddev, cfg.seed);
  return traj;
}

Trajectory test_trajectory(const ExperimentConfig& cfg, const PHSystem& sys) {
  check_ports(cfg.test_inputs, sys, "inputs.test");
  return simulate_midpoint(sys, cfg.test_inputs, initial_state(cfg, sys.state_dim()), cfg.dt,
                           cfg.test_steps());
}

Identification identify(const std::string& method, const Trajectory& train, const Matrix& H,
                        std::optional<int> reduced_order, const ExperimentConfig& cfg) {
  check_method(method);
  check_trajectory(train);
  std::optional<Matrix> basis;
  if (reduced_order) basis = pod_basis(train.X, *reduced_order, cfg.truncation_tol);

  Identification id;
  id.method = method;
  id.basis = basis;
  json rep{{"method", method},
           {"reduced_order", reduced_order ? json(*reduced_order) : json(nullptr)},
           {"samples", train.samples()},
           {"dt", train.dt}};

  if (method == "phdmd") {
    const MidpointData md = midpoint_matrices(train);
    const DataMatrices data = build_ZT(H, md, basis);
    const JRPair init = init_rank_deficient(data.Z, data.T, cfg.truncation_tol);
    SolverOptions opts = cfg.solver;
    opts.truncation_tol = cfg.truncation_tol;
    const SolverResult res = solve_phdmd(data, init.R, opts);
    PHSystem sys = to_ph_system(data, res.pair);
    const auto issues = validate(sys);
    if (!issues.empty()) {
      std::string msg = "identified system violates the pH structure:";
      for (const auto& s : issues) msg += "\n  - " + s;
      fail(ErrorKind::Structure, msg);
    }
    const LTISystem lti = to_lti(sys);
    const EigenInfo eig = eigen_info(lti.A, false);
    rep["init"] = {{"f", objective_json(objective_f(data, init))},
                   {"f_T", objective_json(objective_fT(data, init))}};
    rep["final"] = {{"f", objective_json(objective_f(data, res.pair))},
                    {"f_T", objective_json(objective_fT(data, res.pair))}};
    rep["solver"] = json::parse(to_json(res.report));
    rep["max_real_eigenvalue"] = eig.max_real;
    rep["unstable_eigenvalues"] = eig.unstable;
    if (res.report.rank_T == data.T.rows()) {
      const auto b = lemma38_bound(data.Z, data.T, res.pair, cfg.truncation_tol);
      rep["correlation_bound"] = {{"lhs", b.lhs}, {"weighted", b.weighted}, {"c", b.c}, {"rhs", b.rhs}};
    } else {
      rep["correlation_bound"] = nullptr;
    }
    id.model = std::move(sys);
  } else if (method == "dmd") {
    const LTISystem lti = dmd_fit(dmd_snapshot_matrices(project(train, basis), false), cfg.truncation_tol);
    const EigenInfo eig = eigen_info(lti.A, true);
    rep["time"] = "discrete";
    rep["spectral_radius"] = eig.spectral_radius;
    rep["unstable_eigenvalues"] = eig.unstable;
    rep["unstable"] = eig.spectral_radius > 1.0;
    id.model = lti;
  } else {
    const LTISystem lti = oi_fit(midpoint_matrices(train), basis, cfg.truncation_tol);
    const EigenInfo eig = eigen_info(lti.A, false);
    rep["time"] = "continuous";
    rep["max_real_eigenvalue"] = eig.max_real;
    rep["unstable_eigenvalues"] = eig.unstable;
    rep["unstable"] = eig.unstable > 0;
    id.model = lti;
  }
  id.report_json = rep.dump(2);
  return id;
}

Evaluation evaluate(const PHSystem& truth, const AnyModel& model, const std::optional<Matrix>& basis,
                    const Trajectory& test, const Trajectory& train, const ExperimentConfig& cfg) {
  check_trajectory(test);
  check_trajectory(train);
  if (basis) {
    require(basis->rows() == truth.state_dim(),
            "evaluate: basis has " + std::to_string(basis->rows()) + " rows but the true system has " +
                std::to_string(truth.state_dim()) + " states");
  }
  const Eigen::Index ports = truth.port_dim();
  const auto dims = std::visit(
      [](const auto& m) -> std::pair<Eigen::Index, Eigen::Index> {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, PHSystem>) {
          return {m.port_dim(), m.port_dim()};
        } else {
          return {m.input_dim(), m.output_dim()};
        }
      },
      model);
  if (dims.first != ports || dims.second != ports) {
    fail(ErrorKind::InvalidArgument,
         "evaluate: the true system has " + std::to_string(ports) + " ports but the model has " +
             std::to_string(dims.first) + " inputs and " + std::to_string(dims.second) + " outputs");
  }
  const Vector x0 = initial_state(cfg, truth.state_dim());

  Evaluation ev;
  const Trajectory truth_test = simulate_midpoint(truth, test.U, x0, test.dt);
  ev.test_model = simulate_model(model, basis, test.U, x0, test.dt);
  ev.test = trajectory_error(truth_test.Y, ev.test_model.Y);

  const Trajectory truth_train = simulate_midpoint(truth, train.U, x0, train.dt);
  const Trajectory model_train = simulate_model(model, basis, train.U, x0, train.dt);
  ev.train = trajectory_error(truth_train.Y, model_train.Y);

  if (const auto* ph = std::get_if<PHSystem>(&model)) {
    const auto res = dissipation_residuals(ph->H, ev.test_model);
    const double scale = dissipation_scale(ph->H, ev.test_model);
    double worst = -std::numeric_limits<double>::infinity();
    for (double r : res) worst = std::max(worst, r);
    ev.dissipation_max = worst / scale;
  }

  const auto grid = log_frequency_grid(cfg.frequency.lo, cfg.frequency.hi, cfg.frequency.count);
  ev.reference = transfer_eval(truth, grid);
  ev.error = transfer_error(truth, model, grid);
  return ev;
}

std::string to_json(const Evaluation& ev) {
  json j;
  j["test"] = summary_json(ev.test);
  j["train"] = summary_json(ev.train);
  j["test_finite"] = linalg::all_finite(ev.test_model.Y);
  j["max_abs_error"] = ev.test.abs_error.empty()
                           ? 0.0
                           : *std::max_element(ev.test.abs_error.begin(), ev.test.abs_error.end());
  j["dissipation_max"] = ev.dissipation_max ? json(*ev.dissipation_max) : json(nullptr);
  j["sampled"] = {
      {"h_inf_error", ev.error.h_inf},
      {"h2_error", ev.error.h2},
      {"h_inf_reference", ev.reference.h_inf},
      {"h2_reference", ev.reference.h2},
      {"h_inf_relative", ev.reference.h_inf > 0 ? ev.error.h_inf / ev.reference.h_inf : ev.error.h_inf},
      {"h2_relative", ev.reference.h2 > 0 ? ev.error.h2 / ev.reference.h2 : ev.error.h2},
      {"frequency_points", ev.error.omega.size()},
  };
  return j.dump(2);
}

std::string cmd_generate(const ExperimentConfig& cfg, const fs::path& out) {
  check_config(cfg);
  const PHSystem sys = true_system(cfg);
  const Trajectory train = training_trajectory(cfg, sys);
  const Trajectory test = test_trajectory(cfg, sys);
  fs::create_directories(out);
  write_trajectory_csv(out / "train.csv", train);
  write_trajectory_csv(out / "test.csv", test);
  save_system(sys, out / "model_true");
  write_text(out / "config.json", to_json(cfg));
  json j{{"command", "generate"},
         {"train_samples", train.samples()},
         {"test_samples", test.samples()},
         {"state_dim", sys.state_dim()},
         {"port_dim", sys.port_dim()}};
  return j.dump(2);
}

std::string cmd_identify(const ExperimentConfig& cfg, const fs::path& out, const std::string& method) {
  check_config(cfg);
  check_method(method);
  const fs::path train_path = out / "train.csv";
  if (!fs::exists(train_path)) {
    fail(ErrorKind::Io, "identify: " + train_path.string() + " not found (run generate first)");
  }
  const Trajectory train = read_trajectory_csv(train_path);
  const PHSystem truth = load_truth(cfg, out);
  const Identification id = identify(method, train, truth.H, cfg.reduced_order, cfg);
  save_identification(id, model_dir(out, method));
  return id.report_json;
}

std::string cmd_evaluate(const ExperimentConfig& cfg, const fs::path& out, const std::string& method,
                         const std::optional<fs::path>& reference,
                         const std::optional<fs::path>& model) {
  check_config(cfg);
  const PHSystem truth = reference ? load_system(*reference) : load_truth(cfg, out);
  const fs::path model_path = model ? *model : model_dir(out, method);
  const ModelFiles mf = load_model(model_path);
  const AnyModel m = mf.ph ? AnyModel(*mf.ph) : AnyModel(*mf.lti);

  const Trajectory test = read_or(out / "test.csv", [&] { return test_trajectory(cfg, truth); });
  const Trajectory train = read_or(out / "train.csv", [&] { return training_trajectory(cfg, truth); });
  const Evaluation ev = evaluate(truth, m, mf.basis, test, clean_train(truth, train, cfg), cfg);

  const Trajectory truth_test = simulate_midpoint(truth, test.U, initial_state(cfg, truth.state_dim()), test.dt);
  const fs::path dir = out / "eval" / method;
  const std::string metrics = to_json(ev);
  write_text(dir / "metrics.json", metrics);
  write_text(dir / "error.csv", error_csv(truth_test, ev.test_model, ev.test));
  return metrics;
}

std::string cmd_experiment(const ExperimentConfig& cfg, const fs::path& out) {
  check_config(cfg);
  cmd_generate(cfg, out);
  const PHSystem truth = load_system(out / "model_true");
  const Trajectory train = read_trajectory_csv(out / "train.csv");
  const Trajectory test = read_trajectory_csv(out / "test.csv");
  const Trajectory train_clean = clean_train(truth, train, cfg);

  json summary{{"name", cfg.name},
               {"state_dim", truth.state_dim()},
               {"port_dim", truth.port_dim()},
               {"dt", cfg.dt},
               {"train_samples", train.samples()},
               {"noise_stddev", cfg.noise_stddev},
               {"seed", cfg.seed},
               {"reduced_order", cfg.reduced_order ? json(*cfg.reduced_order) : json(nullptr)}};
  json methods = json::object();
  for (const auto& method : cfg.methods) {
    const Identification id = identify(method, train, truth.H, cfg.reduced_order, cfg);
    save_identification(id, model_dir(out, method));
    json entry{{"identify", json::parse(id.report_json)}};
    // Unstable baselines may blow up in simulation; that is reported, not fatal.
    try {
      const Evaluation ev = evaluate(truth, id.model, id.basis, test, train_clean, cfg);
      const std::string metrics = to_json(ev);
      const Trajectory truth_test =
          simulate_midpoint(truth, test.U, initial_state(cfg, truth.state_dim()), test.dt);
      write_text(out / "eval" / method / "metrics.json", metrics);
      write_text(out / "eval" / method / "error.csv", error_csv(truth_test, ev.test_model, ev.test));
      entry["evaluate"] = json::parse(metrics);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numerical) throw;
      entry["evaluate"] = {{"error", e.what()}};
    }
    methods[method] = std::move(entry);
  }
  summary["methods"] = std::move(methods);

  if (!cfg.sweep.empty()) {
    struct Point {
      json by_method = json::object();
    };
    auto run = [&](int r) {
      Point p;
      for (const auto& method : cfg.methods) {
        try {
          const Identification id = identify(method, train, truth.H, r, cfg);
          const Evaluation ev = evaluate(truth, id.model, id.basis, test, train_clean, cfg);
          p.by_method[method] = {{"h_inf_error", ev.error.h_inf},
                                 {"h2_error", ev.error.h2},
                                 {"h_inf_relative", ev.error.h_inf / ev.reference.h_inf},
                                 {"rel_l2", ev.test.rel_l2},
                                 {"rel_linf", ev.test.rel_linf}};
        } catch (const Error& e) {
          p.by_method[method] = {{"error", e.what()}};
        }
      }
      return p;
    };
    std::vector<Point> points(cfg.sweep.size());
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < cfg.sweep.size(); start += workers) {
      std::vector<std::future<Point>> batch;
      const std::size_t stop = std::min(cfg.sweep.size(), start + workers);
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(std::async(std::launch::async, run, cfg.sweep[i]));
      }
      for (std::size_t i = start; i < stop; ++i) points[i] = batch[i - start].get();
    }
    json sweep{{"orders", cfg.sweep}, {"methods", json::object()}};
    for (const auto& method : cfg.methods) {
      json series = json::array();
      for (const auto& p : points) series.push_back(p.by_method.at(method));
      sweep["methods"][method] = std::move(series);
    }
    write_text(out / "sweep.json", sweep.dump(2));
    summary["sweep"] = "sweep.json";
  }

  const std::string text = summary.dump(2);
  write_text(out / "summary.json", text);
  return text;
}

}  // namespace phdmd
