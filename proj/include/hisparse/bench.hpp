// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Monte-Carlo experiment runner for pilot-overhead, SNR and phase-transition
// studies.
//
// A run is a grid of cells (T, L, O_tau, SNR) times trials. Every trial seeds
// its own generator from (master_seed, cell coordinates, trial), so results
// do not depend on thread count or scheduling, and all algorithms in one
// trial see the same channel, pilots and noise.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hisparse/channel.hpp"
#include "hisparse/hsparse.hpp"

namespace hisparse {

enum class Algorithm { hihtp, htp };
enum class OutputFormat { csv, json };

std::string_view to_string(Algorithm a);
std::string_view to_string(GridMode m);

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

struct ExperimentConfig {
  std::string name = "fig3";
  std::size_t subcarriers = 64;  // N
  std::size_t antennas = 16;     // M
  std::size_t delay_taps = 16;   // D
  std::vector<std::size_t> slots{1};
  std::vector<std::size_t> path_counts{3};
  std::size_t per_angle = 1;  // K
  GridMode mode = GridMode::on_grid;
  std::size_t k_theta = 1;
  std::size_t k_tau = 1;
  std::vector<std::size_t> freq_samples{8};  // O_tau values
  std::size_t space_samples = 16;            // O_theta
  std::vector<double> snr_db{10.0};          // kNoiseless for sigma^2 = 0
  std::vector<Algorithm> algorithms{Algorithm::hihtp, Algorithm::htp};
  std::size_t trials = 200;
  std::uint64_t master_seed = 2018;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::size_t max_iterations = 50;
  double ls_tolerance = 1e-10;
  std::size_t ls_max_iterations = 500;
  std::optional<std::size_t> htp_sparsity;  // default: pattern budget L*K*T
  std::string output_path;
  OutputFormat format = OutputFormat::csv;

  /// Throws a configuration error naming the offending field.
  void validate() const;

  /// Solver sparsity pattern for one (T, L) cell.
  HierPattern pattern(std::size_t slots_in_cell, std::size_t paths) const;
};

/// Named starting points: fig3, fig4, phase, offgrid.
ExperimentConfig preset(std::string_view name);

/// Overlays the fields present in `doc` on `base`. Unknown top-level keys
/// are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base);
/// Starts from the preset named by doc["experiment"] (default fig3).
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct TrialResult {
  std::size_t trial = 0;
  Algorithm algorithm = Algorithm::hihtp;
  std::size_t slots = 1;
  std::size_t paths = 0;
  std::size_t o_tau = 0;
  std::size_t o_theta = 0;
  double snr_db = 0.0;
  double mse = 0.0;      // (1/NM) ||H(t) - H-hat(t)||^2, slot average
  double w_error = 0.0;  // ||W-hat - W|| / ||W||
  /// True support contained in the recovered one; on-grid only.
  std::optional<bool> support_exact;
  std::size_t iterations = 0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  bool ls_converged = true;
  std::string failure;  // non-empty when the trial threw
};

struct CellSummary {
  Algorithm algorithm = Algorithm::hihtp;
  std::size_t slots = 1, paths = 0, o_tau = 0, o_theta = 0;
  double snr_db = 0.0;
  std::size_t count = 0;
  std::size_t failures = 0;
  double mean_mse = 0.0;
  double mse_ci95 = 0.0;  // normal-approximation half width
  double mean_w_error = 0.0;
  double w_error_ci95 = 0.0;
  std::optional<double> exact_rate;
  double mean_iterations = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialResult> trials;  // ordered by (T, L, O_tau, SNR, algorithm, trial)
  std::vector<CellSummary> summary;

  const CellSummary* find(Algorithm a, std::size_t slots, std::size_t o_tau, double snr_db,
                          std::optional<std::size_t> paths = std::nullopt) const;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressCallback& progress = {});

struct PhaseGrid {
  std::vector<std::size_t> freq_samples;  // columns
  std::vector<std::size_t> path_counts;   // rows
  std::vector<std::vector<double>> probability;  // [row][col], exact-support rate
  ExperimentResult runs;
};

/// Noiseless on-grid recovery probability over (L, O_tau) using the first
/// configured algorithm. SNR and mode in cfg are overridden.
PhaseGrid run_phase_transition(const ExperimentConfig& cfg, const ProgressCallback& progress = {});

std::vector<CellSummary> summarize(const std::vector<TrialResult>& trials);

inline constexpr std::string_view kCsvHeader =
    "trial,algorithm,T,O_tau,O_theta,snr_db,mse,w_error,support_exact,iterations,runtime_ms,seed";

void write_csv(std::ostream& os, const std::vector<TrialResult>& trials);
nlohmann::json results_json(const ExperimentResult& result);
nlohmann::json to_json(const PhaseGrid& grid);

/// Writes CSV (trial rows) or JSON (config, trial rows, per-cell summary).
/// Throws an io error naming the path on failure.
void emit_results(const ExperimentResult& result, OutputFormat format, const std::string& path);

}  // namespace hisparse
