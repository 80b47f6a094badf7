#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phdmd/simulate.hpp"
#include "phdmd/solver.hpp"

namespace phdmd {

/// Either the mass-spring-damper builder or a model directory on disk.
struct ModelSpec {
  int n_masses = 3;
  double mass = 4.0;
  double stiffness = 4.0;
  double damping = 1.0;
  int n_ports = 1;
  std::optional<std::filesystem::path> manifest;
};

struct FrequencyGrid {
  double lo = 1e-3;
  double hi = 1e3;
  int count = 400;
};

/// Declarative generate -> identify -> evaluate run. Parsed from a single JSON
/// document; a "preset" key selects a built-in base that the remaining keys
/// override.
struct ExperimentConfig {
  std::string name = "custom";
  ModelSpec model;
  double dt = 0.04;
  double horizon = 4.0;       // training horizon, seconds
  double test_horizon = 10.0;
  std::vector<double> x0;     // empty: zero initial state
  InputSpec train_inputs;
  InputSpec test_inputs;
  double noise_stddev = 0.0;
  std::uint64_t seed = 0;
  std::optional<int> reduced_order;  // POD order for identify/evaluate
  std::vector<int> sweep;            // reduced orders for the experiment sweep
  std::vector<std::string> methods = {"phdmd", "dmd", "oi"};
  SolverOptions solver;
  FrequencyGrid frequency;
  double truncation_tol = kDefaultTruncationTol;

  Eigen::Index train_steps() const;
  Eigen::Index test_steps() const;
};

/// Names accepted by preset().
const std::vector<std::string>& preset_names();

/// Built-in configurations: msd-siso, msd-noisy, msd-mimo-reduction.
/// Throws ErrorKind::Config for an unknown name.
ExperimentConfig preset(const std::string& name);

/// Parses and checks a JSON document. Errors carry ErrorKind::Config and name
/// the offending field (or line/column for syntax errors). Relative manifest
/// paths are resolved against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks ranges and cross-field consistency; throws ErrorKind::Config.
void check_config(const ExperimentConfig& cfg);

/// Canonical JSON form; parse_config(to_json(cfg)) reproduces cfg.
std::string to_json(const ExperimentConfig& cfg);

}  // namespace phdmd
