#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "phdmd/config.hpp"
#include "phdmd/metrics.hpp"

namespace phdmd {

/// The data-generating system named by the config (builder or manifest).
PHSystem true_system(const ExperimentConfig& cfg);

/// Training data: midpoint simulation with the training inputs, plus noise on
/// X and Y when the config asks for it.
Trajectory training_trajectory(const ExperimentConfig& cfg, const PHSystem& sys);
/// Clean simulation with the test inputs over the test horizon.
Trajectory test_trajectory(const ExperimentConfig& cfg, const PHSystem& sys);

/// A fitted model plus the basis its state lives in (n x r, absent when the
/// full state is kept) and a JSON report of the fit.
struct Identification {
  std::string method;
  AnyModel model;
  std::optional<Matrix> basis;
  std::string report_json;
};

/// method is one of phdmd, dmd, oi. reduced_order selects a POD basis of the
/// training states. H is the energy matrix of the data-generating system.
Identification identify(const std::string& method, const Trajectory& train, const Matrix& H,
                        std::optional<int> reduced_order, const ExperimentConfig& cfg);

struct Evaluation {
  ErrorSummary test;       // outputs on the test input
  ErrorSummary train;      // outputs on the (clean) training input
  SampledNorms reference;  // true transfer function
  SampledNorms error;      // error system
  std::optional<double> dissipation_max;  // pH models only, relative to the energy scale
  Trajectory test_model;   // model simulation on the test input
};

/// Simulates `model` on the inputs of `test` and `train` (starting from the
/// projected initial states) and compares against the true system.
Evaluation evaluate(const PHSystem& truth, const AnyModel& model, const std::optional<Matrix>& basis,
                    const Trajectory& test, const Trajectory& train, const ExperimentConfig& cfg);

std::string to_json(const Evaluation& ev);

/// Commands behind the CLI. Each writes its artifacts below `out` and returns
/// a short JSON summary.
///   generate:   train.csv, test.csv, model_true/
///   identify:   models/<method>/ (manifest, blocks, report.json)
///   evaluate:   eval/<method>/metrics.json, eval/<method>/error.csv
///   experiment: all of the above for every method, summary.json and, when
///               the config has a sweep, sweep.json
std::string cmd_generate(const ExperimentConfig& cfg, const std::filesystem::path& out);
std::string cmd_identify(const ExperimentConfig& cfg, const std::filesystem::path& out,
                         const std::string& method);
/// reference/model default to out/model_true and out/models/<method>.
std::string cmd_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& out,
                         const std::string& method,
                         const std::optional<std::filesystem::path>& reference = std::nullopt,
                         const std::optional<std::filesystem::path>& model = std::nullopt);
std::string cmd_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace phdmd
