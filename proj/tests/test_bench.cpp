// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hisparse/bench.hpp"
#include "hisparse/error.hpp"

namespace hisparse {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig c = preset("fig3");
  c.subcarriers = 32;
  c.antennas = 8;
  c.delay_taps = 8;
  c.slots = {1, 2};
  c.path_counts = {2};
  c.freq_samples = {4, 16};
  c.space_samples = 8;
  c.snr_db = {10.0};
  c.trials = 6;
  c.master_seed = 99;
  c.threads = 1;
  return c;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// CSV text with the runtime_ms column blanked.
std::string without_runtime(const std::vector<TrialResult>& trials) {
  std::ostringstream os;
  write_csv(os, trials);
  std::istringstream in(os.str());
  std::string line, out;
  while (std::getline(in, line)) {
    auto cells = split(line);
    cells[10] = "";
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    out += '\n';
  }
  return out;
}

TEST(Csv, HeaderOnlyForEmptyResults) {
  std::ostringstream os;
  write_csv(os, {});
  EXPECT_EQ(os.str(),
            "trial,algorithm,T,O_tau,O_theta,snr_db,mse,w_error,support_exact,iterations,runtime_ms,seed\n");
}

TEST(Csv, SingleTrialRoundTrips) {
  TrialResult r;
  r.trial = 3;
  r.algorithm = Algorithm::htp;
  r.slots = 2;
  r.o_tau = 8;
  r.o_theta = 16;
  r.snr_db = 10.0;
  r.mse = 0.0012345678901234567;
  r.w_error = 1.0 / 3.0;
  r.support_exact = true;
  r.iterations = 4;
  r.runtime_ms = 1.25;
  r.seed = 18446744073709551557ull;
  std::ostringstream os;
  write_csv(os, {r});
  std::istringstream in(os.str());
  std::string header, line, extra;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_FALSE(std::getline(in, extra));
  const auto c = split(line);
  ASSERT_EQ(c.size(), 12u);
  EXPECT_EQ(c[0], "3");
  EXPECT_EQ(c[1], "htp");
  EXPECT_EQ(c[2], "2");
  EXPECT_EQ(std::stod(c[5]), 10.0);
  EXPECT_EQ(std::stod(c[6]), r.mse);
  EXPECT_EQ(std::stod(c[7]), r.w_error);
  EXPECT_EQ(c[8], "true");
  EXPECT_EQ(c[9], "4");
  EXPECT_EQ(std::stod(c[10]), 1.25);
  EXPECT_EQ(std::stoull(c[11]), r.seed);

  r.support_exact.reset();
  r.snr_db = kNoiseless;
  std::ostringstream os2;
  write_csv(os2, {r});
  EXPECT_NE(os2.str().find(",inf,"), std::string::npos);
  EXPECT_NE(os2.str().find(",,4,"), std::string::npos);
}

TEST(RunExperiment, FullSamplingNoiselessIsExact) {
  ExperimentConfig c = small_config();
  c.subcarriers = 16;
  c.delay_taps = 16;
  c.freq_samples = {16};
  c.slots = {1};
  c.snr_db = {kNoiseless};
  c.trials = 1;
  const auto r = run_experiment(c);
  ASSERT_EQ(r.trials.size(), 2u);
  for (const auto& t : r.trials) {
    EXPECT_TRUE(t.failure.empty());
    EXPECT_LE(t.mse, 1e-12);
    EXPECT_EQ(t.support_exact, std::optional<bool>(true));
  }
}

TEST(RunExperiment, DeterministicAcrossRunsAndThreads) {
  ExperimentConfig c = small_config();
  const auto a = run_experiment(c);
  c.threads = 3;
  const auto b = run_experiment(c);
  EXPECT_EQ(without_runtime(a.trials), without_runtime(b.trials));
  c.master_seed = 100;
  const auto d = run_experiment(c);
  EXPECT_NE(without_runtime(a.trials), without_runtime(d.trials));
}

TEST(RunExperiment, OrderingAndPairing) {
  const auto r = run_experiment(small_config());
  // 2 T x 1 L x 2 O_tau x 1 SNR x 2 algorithms x 6 trials
  ASSERT_EQ(r.trials.size(), 48u);
  EXPECT_EQ(r.trials[0].algorithm, Algorithm::hihtp);
  EXPECT_EQ(r.trials[6].algorithm, Algorithm::htp);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(r.trials[k].seed, r.trials[6 + k].seed);
  EXPECT_EQ(r.summary.size(), 8u);
  for (const auto& t : r.trials) {
    EXPECT_GE(t.mse, 0.0);
    EXPECT_TRUE(t.support_exact.has_value());
  }
}

TEST(RunExperiment, SummaryStatistics) {
  std::vector<TrialResult> trials(4);
  const double mses[] = {1.0, 2.0, 3.0, 6.0};
  for (std::size_t i = 0; i < 4; ++i) {
    trials[i].trial = i;
    trials[i].mse = mses[i];
    trials[i].w_error = 0.5;
    trials[i].support_exact = i % 2 == 0;
    trials[i].iterations = 2;
  }
  trials[3].failure = "boom";
  const auto s = summarize(trials);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].count, 4u);
  EXPECT_EQ(s[0].failures, 1u);
  EXPECT_DOUBLE_EQ(s[0].mean_mse, 2.0);
  EXPECT_NEAR(s[0].mse_ci95, 1.96 * 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(*s[0].exact_rate, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(s[0].w_error_ci95, 0.0);
}

TEST(RunExperiment, OffGridHasNoSupportFlag) {
  ExperimentConfig c = preset("offgrid");
  c.subcarriers = 32;
  c.antennas = 16;
  c.delay_taps = 8;
  c.slots = {1};
  c.freq_samples = {16};
  c.path_counts = {2};
  c.snr_db = {20.0};
  c.trials = 2;
  const auto r = run_experiment(c);
  for (const auto& t : r.trials) {
    EXPECT_TRUE(t.failure.empty()) << t.failure;
    EXPECT_FALSE(t.support_exact.has_value());
    EXPECT_LT(t.mse, 1.0);
  }
}

TEST(PhaseTransition, FullSamplingAndStarvedSampling) {
  ExperimentConfig c = preset("phase");
  c.subcarriers = 32;
  c.antennas = 8;
  c.delay_taps = 8;
  c.path_counts = {3};
  c.freq_samples = {1, 32};
  c.space_samples = 8;
  c.trials = 20;
  c.master_seed = 5;
  const auto g = run_phase_transition(c);
  ASSERT_EQ(g.probability.size(), 1u);
  EXPECT_LE(g.probability[0][0], 0.2);
  EXPECT_EQ(g.probability[0][1], 1.0);
}

TEST(Config, PresetsValidate) {
  for (const char* name : {"fig3", "fig4", "phase", "offgrid"}) {
    EXPECT_NO_THROW(preset(name).validate()) << name;
  }
  EXPECT_THROW(preset("fig9"), Error);
}

TEST(Config, JsonOverlayAndRoundTrip) {
  const auto doc = nlohmann::json::parse(R"({
    "experiment": "fig4",
    "dims": {"N": 32, "T": 2},
    "channel": {"L": [1, 2], "mode": "on_grid"},
    "sampling": {"overhead": [0.25, 0.5]},
    "noise": {"snr_db": [0, "inf"]},
    "algorithms": ["htp"],
    "trials": 3,
    "master_seed": 12345678901234,
    "solver": {"htp_sparsity": 4},
    "output": {"path": "x.json", "format": "json"}
  })");
  const auto c = config_from_json(doc);
  EXPECT_EQ(c.name, "fig4");
  EXPECT_EQ(c.subcarriers, 32u);
  EXPECT_EQ(c.slots, (std::vector<std::size_t>{2}));
  EXPECT_EQ(c.path_counts, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(c.freq_samples, (std::vector<std::size_t>{8, 16}));
  ASSERT_EQ(c.snr_db.size(), 2u);
  EXPECT_TRUE(std::isinf(c.snr_db[1]));
  EXPECT_EQ(c.algorithms, (std::vector<Algorithm>{Algorithm::htp}));
  EXPECT_EQ(c.master_seed, 12345678901234u);
  EXPECT_EQ(c.htp_sparsity, std::optional<std::size_t>(4));
  EXPECT_EQ(c.format, OutputFormat::json);

  const auto again = config_from_json(to_json(c), preset("fig3"));
  EXPECT_EQ(to_json(again), to_json(c));
}

void expect_field_error(const std::string& text, const std::string& field) {
  try {
    config_from_json(nlohmann::json::parse(text));
    FAIL() << "accepted " << text;
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::configuration);
    EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
  }
}

TEST(Config, ErrorsNameTheField) {
  expect_field_error(R"({"sampling": {"O_tau": [80]}})", "sampling.O_tau");
  expect_field_error(R"({"trials": 0})", "trials");
  expect_field_error(R"({"trials": -2})", "trials");
  expect_field_error(R"({"dims": {"D": 100}})", "dims.D");
  expect_field_error(R"({"channel": {"L": 17}})", "channel.L");
  expect_field_error(R"({"channel": {"mode": "sideways"}})", "channel.mode");
  expect_field_error(R"({"algorithms": ["omp"]})", "algorithms[0]");
  expect_field_error(R"({"noise": {"snr_db": ["loud"]}})", "noise.snr_db[0]");
  expect_field_error(R"({"bogus": 1})", "bogus");
  expect_field_error(R"({"dims": {"Q": 1}})", "dims.Q");
  expect_field_error(R"({"master_seed": "abc"})", "master_seed");
  expect_field_error(R"({"experiment": "nope"})", "nope");
}

TEST(Emit, WritesCsvAndJson) {
  const auto r = run_experiment(small_config());
  const auto dir = std::filesystem::temp_directory_path() / "hisparse_bench_test";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "out.csv").string();
  const auto js = (dir / "out.json").string();
  emit_results(r, OutputFormat::csv, csv);
  emit_results(r, OutputFormat::json, js);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, std::string(kCsvHeader));
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, r.trials.size());
  std::ifstream jin(js);
  const auto doc = nlohmann::json::parse(jin);
  EXPECT_EQ(doc["trials"].size(), r.trials.size());
  EXPECT_EQ(doc["summary"].size(), r.summary.size());
  EXPECT_TRUE(doc["summary"][0].contains("mse_ci95"));
  std::filesystem::remove_all(dir);
}

TEST(Emit, IoErrorNamesPath) {
  const ExperimentResult r{small_config(), {}, {}};
  const std::string bad = "/nonexistent-dir/out.csv";
  try {
    emit_results(r, OutputFormat::csv, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
    EXPECT_NE(std::string(e.what()).find(bad), std::string::npos);
  }
}

}  // namespace
}  // namespace hisparse
