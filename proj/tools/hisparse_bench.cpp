// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

// Command line front end for experiments and analysis studies. Talks to the
// library only through the C interface.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hisparse/hisparse.h"

namespace {

struct Failure {
  hs_status status;
};

void check(hs_status s) {
  if (s != HS_OK) throw Failure{s};
}

struct StringDeleter {
  void operator()(char* s) const { hs_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ExperimentDeleter {
  void operator()(hs_experiment* e) const { hs_experiment_destroy(e); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_snr(const std::string& s) {
  if (s == "inf" || s == "noiseless") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw std::runtime_error("--snr: '" + s + "' is not a number or inf");
  return v;
}

std::string cell_text(const nlohmann::json& v) {
  if (v.is_null()) return "-";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v.get<double>());
    return buf;
  }
  return v.dump();
}

void print_summary(const std::string& summary_json) {
  const auto rows = nlohmann::json::parse(summary_json);
  std::printf("%-6s %3s %3s %6s %8s %5s %11s %10s %8s %6s\n", "alg", "T", "L", "O_tau", "snr_db",
              "n", "mean_mse", "ci95", "exact", "iters");
  for (const auto& r : rows) {
    std::printf("%-6s %3s %3s %6s %8s %5s %11s %10s %8s %6s\n",
                cell_text(r["algorithm"]).c_str(), cell_text(r["T"]).c_str(),
                cell_text(r["L"]).c_str(), cell_text(r["O_tau"]).c_str(),
                cell_text(r["snr_db"]).c_str(), cell_text(r["count"]).c_str(),
                cell_text(r["mean_mse"]).c_str(), cell_text(r["mse_ci95"]).c_str(),
                cell_text(r["exact_rate"]).c_str(), cell_text(r["mean_iterations"]).c_str());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text << '\n';
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo channel estimation experiments and analysis studies"};
  std::string config_path, out_path, format, experiment, study, params;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials, threads;
  std::vector<std::string> snr;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "Output file for trial results or study report");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--trials", trials, "Trials per cell")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  app.add_option("--experiment", experiment, "Preset experiment")
      ->check(CLI::IsMember({"fig3", "fig4", "phase", "offgrid"}));
  app.add_option("--snr", snr, "SNR values in dB (inf = noiseless)");
  app.add_option("--study", study, "Run an analysis study instead of an experiment")
      ->check(CLI::IsMember({"lemma1", "prop1", "hirip", "theorem1"}));
  app.add_option("--params", params, "JSON parameters for --study");
  app.add_flag("--quiet", quiet, "Suppress the summary table");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!study.empty()) {
      char* raw = nullptr;
      check(hs_analysis_run(study.c_str(), params.empty() ? nullptr : params.c_str(), &raw));
      OwnedString report(raw);
      if (out_path.empty()) {
        std::cout << report.get() << '\n';
      } else {
        write_text(out_path, report.get());
      }
      return 0;
    }

    std::string config_text;
    if (!config_path.empty()) config_text = read_file(config_path);
    hs_experiment* raw = nullptr;
    check(hs_experiment_create(experiment.empty() ? nullptr : experiment.c_str(),
                               config_text.empty() ? nullptr : config_text.c_str(), &raw));
    std::unique_ptr<hs_experiment, ExperimentDeleter> exp(raw);

    if (seed) check(hs_experiment_set_seed(exp.get(), *seed));
    if (trials) check(hs_experiment_set_trials(exp.get(), *trials));
    if (threads) check(hs_experiment_set_threads(exp.get(), *threads));
    if (!snr.empty()) {
      std::vector<double> values;
      for (const auto& s : snr) values.push_back(parse_snr(s));
      check(hs_experiment_set_snr(exp.get(), values.data(), values.size()));
    }

    char* cfg_raw = nullptr;
    check(hs_experiment_config_json(exp.get(), &cfg_raw));
    const auto cfg = nlohmann::json::parse(OwnedString(cfg_raw).get());
    if (out_path.empty()) out_path = cfg["output"]["path"].get<std::string>();
    if (format.empty()) {
      const bool json_ext = out_path.size() >= 5 && out_path.substr(out_path.size() - 5) == ".json";
      format = json_ext ? "json" : cfg["output"]["format"].get<std::string>();
    }

    const bool phase = cfg["name"] == "phase";
    if (phase) {
      char* grid_raw = nullptr;
      check(hs_experiment_run_phase(exp.get(), &grid_raw));
      OwnedString grid(grid_raw);
      if (!quiet) std::cout << grid.get() << '\n';
    } else {
      check(hs_experiment_run(exp.get()));
    }
    if (!quiet) {
      char* sum_raw = nullptr;
      check(hs_experiment_summary_json(exp.get(), &sum_raw));
      print_summary(OwnedString(sum_raw).get());
    }
    if (!out_path.empty()) {
      check(hs_experiment_write(exp.get(), out_path.c_str(),
                                format == "json" ? HS_FORMAT_JSON : HS_FORMAT_CSV));
    }
    return 0;
  } catch (const Failure& f) {
    std::cerr << "hisparse-bench: " << hs_status_name(f.status) << ": " << hs_last_error() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hisparse-bench: " << e.what() << '\n';
    return 2;
  }
}
