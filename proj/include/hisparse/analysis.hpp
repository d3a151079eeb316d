// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Empirical checks of restricted-isometry style constants and of the
// approximation rates behind off-grid recovery.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "hisparse/hsparse.hpp"
#include "hisparse/rng.hpp"

namespace hisparse {

enum class RipMode { exhaustive, sampled };

struct RipEstimate {
  /// Depth-1 pattern for standard RIP, deeper for hierarchical RIP.
  HierPattern sparsity;
  /// Exact constant in exhaustive mode, a lower bound when sampled.
  double delta = 0.0;
  RipMode mode = RipMode::exhaustive;
  std::size_t supports_examined = 0;
  /// Extreme Gram eigenvalues seen over the examined supports.
  double lambda_min = 1.0;
  double lambda_max = 1.0;
};

inline constexpr std::size_t kDefaultRipSamples = 10000;

/// delta = max over supports S of max(1 - lambda_min, lambda_max - 1) of
/// the Gram matrix A_S^H A_S. Maximal supports suffice (interlacing).
/// Exhaustive mode throws a capacity error beyond 1e6 supports.
RipEstimate empirical_rip(const Eigen::MatrixXcd& mat, std::size_t sparsity,
                          RipMode mode = RipMode::exhaustive, Rng* rng = nullptr,
                          std::size_t samples = kDefaultRipSamples);
RipEstimate empirical_rip(const Eigen::MatrixXcd& mat, const HierPattern& pattern,
                          RipMode mode = RipMode::exhaustive, Rng* rng = nullptr,
                          std::size_t samples = kDefaultRipSamples);

/// Kronecker product M_1 (x) M_2 (x) ... (level 1 outermost).
Eigen::MatrixXcd kronecker(const std::vector<Eigen::MatrixXcd>& factors);

/// Unit-norm columns.
Eigen::MatrixXcd normalize_columns(Eigen::MatrixXcd mat);

struct ProductCheck {
  std::vector<double> factor_deltas;  // delta_{s_k}(M_k)
  double bound = 0.0;                 // prod (1 + delta_{s_k}) - 1
  double exact = 0.0;                 // hierarchical delta_s of the product
  bool holds = false;                 // exact <= bound + 1e-9
};

/// Exhaustive check of the Kronecker HiRIP product bound.
ProductCheck hirip_product_check(const std::vector<Eigen::MatrixXcd>& factors,
                                 const HierPattern& pattern);

struct RipFloor {
  std::vector<double> factor_deltas;
  double max_factor_delta = 0.0;
  double product_delta = 0.0;
  bool holds = false;  // product >= max factor - 1e-9
};

/// Standard s-RIP of a Kronecker product against that of its factors
/// (factor sparsity clipped to its column count).
RipFloor kronecker_rip_floor(const std::vector<Eigen::MatrixXcd>& factors,
                             std::size_t total_sparsity);

struct RecoveryConstants {
  double delta = 0.0;
  double kappa_printed = 0.0;   // (2 delta / (1 - delta^2))^{1/2}
  double kappa_standard = 0.0;  // (2 delta^2 / (1 - delta^2))^{1/2}
  std::optional<double> tau_printed;   // 5.15 / (1 - kappa) when kappa < 1
  std::optional<double> tau_standard;
};

/// Domain error unless 0 <= delta < 1.
RecoveryConstants theorem1_constants(double delta);

enum class KernelKind { angle, delay };

struct DecayCurve {
  double parameter = 0.0;
  std::vector<double> errors;  // one per K value
  double slope = 0.0;          // log-log least squares; NaN if any error is 0
  bool monotone = true;
};

struct DecayReport {
  KernelKind kind = KernelKind::angle;
  std::size_t dimension = 0;
  std::vector<std::size_t> k_values;
  std::vector<DecayCurve> curves;
  std::vector<double> worst_errors;  // max over parameters, per K
  double worst_slope = 0.0;
  bool monotone = true;
};

/// Best (2K+1)-term approximation error of the Dirichlet kernel, i.e. the
/// l2 norm of all but its 2K+1 largest entries.
double best_sparse_error(const CVector& u, std::size_t terms);

/// Fits log(error) = a + slope log(K). Zero errors make the slope NaN.
double loglog_slope(const std::vector<std::size_t>& k, const std::vector<double>& err);

/// Dimension error unless dim >= 2 max(K) + 1.
DecayReport lemma1_decay(KernelKind kind, std::size_t dimension,
                         const std::vector<std::size_t>& k_values,
                         const std::vector<double>& parameters);

struct Prop1Row {
  std::size_t k_theta = 0;
  std::size_t k_tau = 0;
  double max_ratio = 0.0;   // error / ((1/K_theta + 1/K_tau) sum |rho|)
  double mean_ratio = 0.0;
  /// Same error against (K_theta^{-1/2} + K_tau^{-1/2}) sum |rho|.
  double max_sqrt_ratio = 0.0;
};

struct Prop1Report {
  std::size_t antennas = 0, subcarriers = 0, paths = 0, per_angle = 0, trials = 0;
  std::vector<Prop1Row> rows;
  double fitted_constant = 0.0;       // max of max_ratio
  double fitted_sqrt_constant = 0.0;  // max of max_sqrt_ratio
  bool ratio_increasing = false;      // max_ratio strictly increasing along the sweep
};

/// Off-grid draws (separated for the largest K_theta, T = 1), rectangle
/// approximation error against the inverse-K envelope. k_theta and k_tau are
/// paired element-wise.
Prop1Report prop1_constant_fit(std::size_t antennas, std::size_t subcarriers, std::size_t paths,
                               std::size_t per_angle, const std::vector<std::size_t>& k_theta,
                               const std::vector<std::size_t>& k_tau, std::size_t trials,
                               Rng& rng);

nlohmann::json to_json(const RipEstimate& e);
nlohmann::json to_json(const ProductCheck& c);
nlohmann::json to_json(const RipFloor& f);
nlohmann::json to_json(const RecoveryConstants& c);
nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const Prop1Report& r);

}  // namespace hisparse
