// Exercises the shared library through its C header only.

#include <cstring>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "phdmd/phdmd.h"
#include "tempdir.hpp"

using testing_support::TempDir;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  phdmd_string_free(s);
  return out;
}

}  // namespace

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_GT(std::strlen(phdmd_version()), 0u);
  EXPECT_STREQ(phdmd_status_string(PHDMD_OK), "ok");
  EXPECT_STRNE(phdmd_status_string(PHDMD_ERR_CONFIG), phdmd_status_string(PHDMD_ERR_IO));
}

TEST(CApi, NullArgumentsAreRejected) {
  EXPECT_EQ(phdmd_config_preset(nullptr, nullptr), PHDMD_ERR_INVALID_ARGUMENT);
  EXPECT_GT(std::strlen(phdmd_last_error()), 0u);
  size_t n = 0, m = 0;
  EXPECT_EQ(phdmd_system_dims(nullptr, &n, &m), PHDMD_ERR_INVALID_ARGUMENT);
  phdmd_config_free(nullptr);
  phdmd_system_free(nullptr);
  phdmd_trajectory_free(nullptr);
  phdmd_result_free(nullptr);
  phdmd_string_free(nullptr);
}

TEST(CApi, ConfigErrorsMapToStatus) {
  phdmd_config* cfg = nullptr;
  EXPECT_EQ(phdmd_config_preset("nope", &cfg), PHDMD_ERR_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_EQ(phdmd_config_parse("{\"integration\": {\"horizon\": 0}}", &cfg), PHDMD_ERR_CONFIG);
  EXPECT_NE(std::string(phdmd_last_error()).find("horizon"), std::string::npos);
  EXPECT_EQ(phdmd_config_load("/nonexistent.json", &cfg), PHDMD_ERR_IO);
}

TEST(CApi, SystemBlocksAndValidation) {
  phdmd_system* sys = nullptr;
  ASSERT_EQ(phdmd_system_msd(3, 4, 4, 1, 1, &sys), PHDMD_OK);
  size_t n = 0, m = 0;
  ASSERT_EQ(phdmd_system_dims(sys, &n, &m), PHDMD_OK);
  EXPECT_EQ(n, 6u);
  EXPECT_EQ(m, 1u);
  std::vector<double> h(36);
  ASSERT_EQ(phdmd_system_block(sys, 'H', h.data(), h.size()), PHDMD_OK);
  EXPECT_EQ(h[0], 4.0);
  EXPECT_EQ(h[7], 0.25);  // column-major (1, 1)
  EXPECT_EQ(phdmd_system_block(sys, 'H', h.data(), 5), PHDMD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(phdmd_system_block(sys, 'Q', h.data(), h.size()), PHDMD_ERR_INVALID_ARGUMENT);
  size_t violations = 99;
  ASSERT_EQ(phdmd_system_validate(sys, 1e-10, &violations), PHDMD_OK);
  EXPECT_EQ(violations, 0u);
  double re = 1.0;
  ASSERT_EQ(phdmd_system_max_real_eigenvalue(sys, &re), PHDMD_OK);
  EXPECT_LT(re, 0.0);

  TempDir tmp;
  const std::string dir = (tmp / "m").string();
  ASSERT_EQ(phdmd_system_save(sys, dir.c_str()), PHDMD_OK);
  phdmd_system* back = nullptr;
  ASSERT_EQ(phdmd_system_load(dir.c_str(), &back), PHDMD_OK);
  std::vector<double> h2(36);
  ASSERT_EQ(phdmd_system_block(back, 'H', h2.data(), h2.size()), PHDMD_OK);
  EXPECT_EQ(h, h2);
  EXPECT_EQ(phdmd_system_load((tmp / "missing").string().c_str(), &back), PHDMD_ERR_IO);
  phdmd_system_free(back);
  phdmd_system_free(sys);
  EXPECT_EQ(phdmd_system_msd(0, 4, 4, 1, 1, &sys), PHDMD_ERR_INVALID_ARGUMENT);
}

TEST(CApi, SimulateIdentifyRoundTrip) {
  phdmd_config* cfg = nullptr;
  ASSERT_EQ(phdmd_config_preset("msd-siso", &cfg), PHDMD_OK);
  phdmd_system* truth = nullptr;
  ASSERT_EQ(phdmd_system_msd(3, 4, 4, 1, 1, &truth), PHDMD_OK);
  phdmd_trajectory* train = nullptr;
  ASSERT_EQ(phdmd_simulate_training(cfg, truth, &train), PHDMD_OK);
  size_t samples = 0, inputs = 0, states = 0, outputs = 0;
  ASSERT_EQ(phdmd_trajectory_dims(train, &samples, &inputs, &states, &outputs), PHDMD_OK);
  EXPECT_EQ(samples, 101u);
  EXPECT_EQ(states, 6u);
  std::vector<double> t(samples);
  ASSERT_EQ(phdmd_trajectory_series(train, 't', t.data(), t.size()), PHDMD_OK);
  EXPECT_NEAR(t.back(), 4.0, 1e-12);

  phdmd_result* res = nullptr;
  ASSERT_EQ(phdmd_identify(cfg, train, truth, "phdmd", 0, &res), PHDMD_OK);
  const auto report = nlohmann::json::parse(take([&] {
    char* s = nullptr;
    EXPECT_EQ(phdmd_result_report(res, &s), PHDMD_OK);
    return s;
  }()));
  EXPECT_LE(report["final"]["f"]["relative"].get<double>(), 1e-8);
  phdmd_system* fitted = nullptr;
  ASSERT_EQ(phdmd_result_system(res, &fitted), PHDMD_OK);
  size_t violations = 1;
  ASSERT_EQ(phdmd_system_validate(fitted, 1e-10, &violations), PHDMD_OK);
  EXPECT_EQ(violations, 0u);

  phdmd_result* dmd = nullptr;
  ASSERT_EQ(phdmd_identify(cfg, train, truth, "dmd", 0, &dmd), PHDMD_OK);
  phdmd_system* none = nullptr;
  EXPECT_EQ(phdmd_result_system(dmd, &none), PHDMD_ERR_INVALID_ARGUMENT);
  phdmd_result* bad = nullptr;
  EXPECT_EQ(phdmd_identify(cfg, train, truth, "phdmd", 7, &bad), PHDMD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(phdmd_identify(cfg, train, truth, "other", 0, &bad), PHDMD_ERR_INVALID_ARGUMENT);

  TempDir tmp;
  const std::string csv = (tmp / "train.csv").string();
  ASSERT_EQ(phdmd_trajectory_write(train, csv.c_str()), PHDMD_OK);
  phdmd_trajectory* back = nullptr;
  ASSERT_EQ(phdmd_trajectory_read(csv.c_str(), &back), PHDMD_OK);
  std::vector<double> x1(samples * states), x2(samples * states);
  phdmd_trajectory_series(train, 'X', x1.data(), x1.size());
  phdmd_trajectory_series(back, 'X', x2.data(), x2.size());
  EXPECT_EQ(x1, x2);

  phdmd_trajectory_free(back);
  phdmd_system_free(fitted);
  phdmd_result_free(dmd);
  phdmd_result_free(res);
  phdmd_trajectory_free(train);
  phdmd_system_free(truth);
  phdmd_config_free(cfg);
}

TEST(CApi, CommandsWriteArtifacts) {
  TempDir tmp;
  phdmd_config* cfg = nullptr;
  ASSERT_EQ(phdmd_config_preset("msd-siso", &cfg), PHDMD_OK);
  const std::string out = tmp.path().string();
  EXPECT_EQ(phdmd_cmd_identify(cfg, out.c_str(), "phdmd", nullptr), PHDMD_ERR_IO);
  char* summary = nullptr;
  ASSERT_EQ(phdmd_cmd_generate(cfg, out.c_str(), &summary), PHDMD_OK);
  EXPECT_EQ(nlohmann::json::parse(take(summary))["train_samples"], 101);
  ASSERT_EQ(phdmd_cmd_identify(cfg, out.c_str(), "phdmd", nullptr), PHDMD_OK);
  ASSERT_EQ(phdmd_cmd_evaluate(cfg, out.c_str(), "phdmd", nullptr, nullptr, &summary), PHDMD_OK);
  EXPECT_LE(nlohmann::json::parse(take(summary))["test"]["rel_l2"].get<double>(), 1e-6);
  phdmd_config_free(cfg);
}

TEST(CApi, SeedOverrideChangesNoise) {
  phdmd_config* cfg = nullptr;
  ASSERT_EQ(phdmd_config_preset("msd-noisy", &cfg), PHDMD_OK);
  ASSERT_EQ(phdmd_config_set_seed(cfg, 42), PHDMD_OK);
  char* text = nullptr;
  ASSERT_EQ(phdmd_config_to_json(cfg, &text), PHDMD_OK);
  EXPECT_EQ(nlohmann::json::parse(take(text))["noise"]["seed"], 42);
  phdmd_config_free(cfg);
}
