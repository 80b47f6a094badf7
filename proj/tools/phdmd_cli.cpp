// phdmd command-line driver. Talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "phdmd/phdmd.h"

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kNumerical = 3 };

int exit_code(phdmd_status s) {
  switch (s) {
    case PHDMD_OK: return kOk;
    case PHDMD_ERR_INVALID_ARGUMENT:
    case PHDMD_ERR_CONFIG:
    case PHDMD_ERR_IO: return kUsage;
    case PHDMD_ERR_STRUCTURE:
    case PHDMD_ERR_NUMERICAL: return kNumerical;
    case PHDMD_ERR_INTERNAL: return kInternal;
  }
  return kInternal;
}

int report(phdmd_status s) {
  if (s != PHDMD_OK) {
    std::fprintf(stderr, "phdmd: %s: %s\n", phdmd_status_string(s), phdmd_last_error());
  }
  return exit_code(s);
}

struct Options {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string method = "phdmd";
  std::string reference;
  std::string model;
  bool quiet = false;
};

class ConfigHandle {
 public:
  ~ConfigHandle() { phdmd_config_free(cfg_); }
  phdmd_status open(const Options& o) {
    phdmd_status s = o.config.empty() ? phdmd_config_preset(o.preset.c_str(), &cfg_)
                                      : phdmd_config_load(o.config.c_str(), &cfg_);
    if (s == PHDMD_OK && o.seed) s = phdmd_config_set_seed(cfg_, *o.seed);
    return s;
  }
  const phdmd_config* get() const { return cfg_; }

 private:
  phdmd_config* cfg_ = nullptr;
};

void print_summary(char* summary, bool quiet) {
  if (summary && !quiet) std::printf("%s\n", summary);
  phdmd_string_free(summary);
}

int run(const std::string& command, const Options& o) {
  if (o.config.empty() == o.preset.empty()) {
    std::fprintf(stderr, "phdmd: give exactly one of --config or --preset\n");
    return kUsage;
  }
  ConfigHandle cfg;
  if (phdmd_status s = cfg.open(o); s != PHDMD_OK) return report(s);

  char* summary = nullptr;
  phdmd_status s = PHDMD_OK;
  if (command == "generate") {
    s = phdmd_cmd_generate(cfg.get(), o.out.c_str(), &summary);
  } else if (command == "identify") {
    s = phdmd_cmd_identify(cfg.get(), o.out.c_str(), o.method.c_str(), &summary);
  } else if (command == "evaluate") {
    s = phdmd_cmd_evaluate(cfg.get(), o.out.c_str(), o.method.c_str(),
                           o.reference.empty() ? nullptr : o.reference.c_str(),
                           o.model.empty() ? nullptr : o.model.c_str(), &summary);
  } else {
    s = phdmd_cmd_experiment(cfg.get(), o.out.c_str(), &summary);
  }
  if (s != PHDMD_OK) return report(s);
  print_summary(summary, o.quiet);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Port-Hamiltonian system identification from time-series data"};
  app.set_version_flag("--version", std::string(phdmd_version()));
  app.require_subcommand(1);

  Options o;
  auto add_common = [&](CLI::App* sub) {
    auto* config = sub->add_option("--config", o.config, "JSON experiment configuration");
    auto* preset = sub->add_option("--preset", o.preset,
                                   "built-in configuration (msd-siso, msd-noisy, msd-mimo-reduction)");
    config->excludes(preset);
    sub->add_option("--out", o.out, "output directory")->required();
    sub->add_option("--seed", o.seed, "noise seed (overrides the configuration)");
    sub->add_flag("--quiet,-q", o.quiet, "do not print the JSON summary");
  };

  auto* gen = app.add_subcommand("generate", "simulate training and test trajectories");
  add_common(gen);
  auto* ident = app.add_subcommand("identify", "fit a model to <out>/train.csv");
  add_common(ident);
  ident->add_option("--method", o.method, "phdmd, dmd or oi")
      ->check(CLI::IsMember({"phdmd", "dmd", "oi"}));
  auto* eval = app.add_subcommand("evaluate", "compare an identified model with the true system");
  add_common(eval);
  eval->add_option("--method", o.method, "phdmd, dmd or oi")
      ->check(CLI::IsMember({"phdmd", "dmd", "oi"}));
  eval->add_option("--reference", o.reference, "true model directory (default <out>/model_true)");
  eval->add_option("--model", o.model, "identified model directory (default <out>/models/<method>)");
  auto* exp = app.add_subcommand("experiment", "generate, identify with every method, evaluate");
  add_common(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  for (const auto* sub : app.get_subcommands()) return run(sub->get_name(), o);
  return kUsage;
}
