// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hisparse/channel.hpp"
#include "hisparse/hsparse.hpp"
#include "hisparse/sensing.hpp"

namespace hisparse {

struct SolverConfig {
  HierPattern pattern;
  std::size_t max_iterations = 50;
  double ls_tolerance = 1e-10;
  std::size_t ls_max_iterations = 500;
  /// Stop as soon as the thresholded support repeats.
  bool stop_on_stable_support = true;

  explicit SolverConfig(HierPattern p) : pattern(std::move(p)) {}
  void validate() const;
};

struct LeastSquaresResult {
  CVector coefficients;  // full length, zero off the support
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  /// Support larger than the number of measurements; the minimum-norm
  /// solution was returned.
  bool underdetermined = false;
};

struct SolveResult {
  HierVector estimate;
  HierSupport support;
  std::size_t iterations = 0;
  double residual_norm = 0.0;
  /// False when any inner least-squares solve hit its iteration cap.
  bool ls_converged = true;
  /// ||W-bar - W^(i)|| for i = 0, 1, ..., filled when ground truth is given.
  std::vector<double> error_history;
};

/// argmin ||x - A c|| over c supported on `support`, by conjugate gradients
/// on the normal equations (CGLS) with matrix-free operator applications.
/// Stops when ||(A^H r)_S|| <= tolerance * ||x||.
LeastSquaresResult restricted_least_squares(const MeasurementOperator& op,
                                            const HierSupport& support, const CVector& x,
                                            double tolerance = 1e-10,
                                            std::size_t max_iterations = 500,
                                            const CVector* warm_start = nullptr);

/// Hierarchical hard thresholding pursuit: gradient step, hierarchical
/// thresholding, least squares on the selected support, until the support
/// repeats or max_iterations is reached. `ground_truth` (optional, empty
/// span to skip) enables error_history.
SolveResult hihtp(const CVector& x, const MeasurementOperator& op, const SolverConfig& cfg,
                  std::span<const cdouble> ground_truth = {});

/// Standard HTP: same iteration with plain top-s selection over the whole
/// coefficient vector. cfg.pattern is ignored apart from the shape check.
SolveResult htp_baseline(const CVector& x, const MeasurementOperator& op,
                         std::size_t total_sparsity, const SolverConfig& cfg,
                         std::span<const cdouble> ground_truth = {});

/// H-hat(t) = F_{N,D} W-hat(t) F_M^H.
ChannelStack reconstruct_h(const HierVector& w_hat, const SteeringConfig& steering);

/// (1/NM) ||H(t) - H-hat(t)||^2 averaged over slots.
double channel_mse(const ChannelStack& h, const ChannelStack& h_hat);

}  // namespace hisparse
