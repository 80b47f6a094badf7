#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "oracles.hpp"
#include "phdmd/config.hpp"
#include "phdmd/error.hpp"
#include "phdmd/model_io.hpp"
#include "phdmd/pipeline.hpp"
#include "phdmd/trajectory_io.hpp"
#include "tempdir.hpp"

using nlohmann::json;
using testing_support::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(Generate, SisoTrainingFileShape) {
  TempDir tmp;
  phdmd::cmd_generate(phdmd::preset("msd-siso"), tmp.path());
  const std::string text = slurp(tmp / "train.csv");
  EXPECT_EQ(count_lines(text), 102u);  // header + 101 samples
  const std::string header = text.substr(0, text.find('\n'));
  EXPECT_EQ(std::count(header.begin(), header.end(), ',') + 1, 1 + 1 + 6 + 1);
  EXPECT_TRUE(std::filesystem::exists(tmp / "model_true" / "manifest.json"));
  EXPECT_NO_THROW(phdmd::parse_config(slurp(tmp / "config.json")));
}

TEST(Generate, IsDeterministic) {
  TempDir a, b;
  auto cfg = phdmd::preset("msd-noisy");
  phdmd::cmd_generate(cfg, a.path());
  phdmd::cmd_generate(cfg, b.path());
  EXPECT_EQ(slurp(a / "train.csv"), slurp(b / "train.csv"));
  EXPECT_EQ(slurp(a / "test.csv"), slurp(b / "test.csv"));
  cfg.seed += 1;
  TempDir c;
  phdmd::cmd_generate(cfg, c.path());
  EXPECT_NE(slurp(a / "train.csv"), slurp(c / "train.csv"));
}

TEST(Identify, NeedsGeneratedData) {
  TempDir tmp;
  try {
    phdmd::cmd_identify(phdmd::preset("msd-siso"), tmp.path(), "phdmd");
    FAIL();
  } catch (const phdmd::Error& e) {
    EXPECT_EQ(e.kind(), phdmd::ErrorKind::Io);
  }
}

TEST(Identify, SisoReportsAndModelDirectories) {
  TempDir tmp;
  const auto cfg = phdmd::preset("msd-siso");
  phdmd::cmd_generate(cfg, tmp.path());

  const json ph = json::parse(phdmd::cmd_identify(cfg, tmp.path(), "phdmd"));
  EXPECT_LE(ph["final"]["f"]["relative"].get<double>(), 1e-8);
  EXPECT_LE(ph["init"]["f_T"]["relative"].get<double>(), 1e-8);
  EXPECT_FALSE(ph["solver"]["history"].empty());
  const auto sys = phdmd::load_system(tmp / "models/phdmd");
  EXPECT_TRUE(phdmd::validate(sys).empty());

  const json dmd = json::parse(phdmd::cmd_identify(cfg, tmp.path(), "dmd"));
  EXPECT_TRUE(dmd["unstable"].get<bool>());
  EXPECT_GT(dmd["spectral_radius"].get<double>(), 1.0);
  const auto files = phdmd::load_model(tmp / "models/dmd");
  EXPECT_EQ(files.kind, phdmd::ModelKind::StateSpace);
  EXPECT_TRUE(files.lti->discrete);

  EXPECT_NO_THROW(phdmd::cmd_identify(cfg, tmp.path(), "oi"));
  EXPECT_THROW(phdmd::cmd_identify(cfg, tmp.path(), "sindy"), phdmd::Error);
}

TEST(Identify, ReductionBeyondStateRankFails) {
  const auto cfg = phdmd::preset("msd-siso");
  const auto truth = phdmd::true_system(cfg);
  const auto train = phdmd::training_trajectory(cfg, truth);
  EXPECT_THROW(phdmd::identify("phdmd", train, truth.H, 7, cfg), phdmd::Error);
  EXPECT_NO_THROW(phdmd::identify("phdmd", train, truth.H, 4, cfg));
}

TEST(Evaluate, IdenticalModelsHaveZeroError) {
  TempDir tmp;
  const auto cfg = phdmd::preset("msd-siso");
  phdmd::cmd_generate(cfg, tmp.path());
  const json m = json::parse(
      phdmd::cmd_evaluate(cfg, tmp.path(), "phdmd", std::nullopt, tmp / "model_true"));
  EXPECT_EQ(m["test"]["rel_l2"].get<double>(), 0.0);
  EXPECT_EQ(m["sampled"]["h_inf_error"].get<double>(), 0.0);
}

TEST(Evaluate, IdentifiedSisoModelReproducesTraining) {
  TempDir tmp;
  const auto cfg = phdmd::preset("msd-siso");
  phdmd::cmd_generate(cfg, tmp.path());
  phdmd::cmd_identify(cfg, tmp.path(), "phdmd");
  const json m = json::parse(phdmd::cmd_evaluate(cfg, tmp.path(), "phdmd"));
  EXPECT_LE(m["train"]["rel_l2"].get<double>(), 1e-6);
  EXPECT_LE(m["test"]["rel_l2"].get<double>(), 1e-6);
  EXPECT_LE(m["dissipation_max"].get<double>(), 1e-9);
  const std::string csv = slurp(tmp / "eval/phdmd/error.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,y_true_1,y_model_1,abs_error");
}

TEST(Evaluate, MismatchedPortsFail) {
  TempDir tmp;
  const auto cfg = phdmd::preset("msd-siso");
  phdmd::cmd_generate(cfg, tmp.path());
  phdmd::save_system(phdmd::msd_builder(3, 4, 4, 1, 2), tmp / "two_ports");
  EXPECT_THROW(phdmd::cmd_evaluate(cfg, tmp.path(), "phdmd", std::nullopt, tmp / "two_ports"),
               phdmd::Error);
}

TEST(Experiment, SisoSummary) {
  TempDir tmp;
  const json s = json::parse(phdmd::cmd_experiment(phdmd::preset("msd-siso"), tmp.path()));
  EXPECT_LE(s["methods"]["phdmd"]["identify"]["init"]["f_T"]["relative"].get<double>(), 1e-8);
  EXPECT_TRUE(std::filesystem::exists(tmp / "summary.json"));
  for (const char* m : {"phdmd", "dmd", "oi"}) {
    EXPECT_TRUE(std::filesystem::exists(tmp / "models" / m / "manifest.json")) << m;
  }
}

// Noisy data: the identified model is still stable and its error over the
// 10 s test horizon stays bounded.
TEST(Experiment, NoisyPresetGivesStableBoundedModel) {
  TempDir tmp;
  const auto cfg = phdmd::preset("msd-noisy");
  const json s = json::parse(phdmd::cmd_experiment(cfg, tmp.path()));
  const auto& ph = s["methods"]["phdmd"];
  EXPECT_LE(ph["identify"]["max_real_eigenvalue"].get<double>(), 1e-10);
  EXPECT_TRUE(ph["evaluate"]["test_finite"].get<bool>());
  const double worst = ph["evaluate"]["max_abs_error"].get<double>();
  const auto truth = phdmd::true_system(cfg);
  const auto test = phdmd::test_trajectory(cfg, truth);
  EXPECT_LT(worst, 10.0 * test.Y.cwiseAbs().maxCoeff());
  EXPECT_EQ(cfg.test_steps(), 250);
}

TEST(Experiment, SmallReductionSweep) {
  TempDir tmp;
  auto cfg = phdmd::preset("msd-siso");
  cfg.model.n_masses = 6;
  cfg.sweep = {2, 4, 6};
  cfg.methods = {"phdmd", "oi"};
  phdmd::cmd_experiment(cfg, tmp.path());
  const json sweep = json::parse(slurp(tmp / "sweep.json"));
  EXPECT_EQ(sweep["orders"], json({2, 4, 6}));
  for (const auto& e : sweep["methods"]["phdmd"]) EXPECT_TRUE(e.contains("h_inf_error"));
  EXPECT_EQ(sweep["methods"]["oi"].size(), 3u);
}
