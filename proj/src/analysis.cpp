// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include "hisparse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "hisparse/channel.hpp"
#include "hisparse/error.hpp"

namespace hisparse {

namespace {

constexpr double kSlack = 1e-9;

class GramSweep {
 public:
  explicit GramSweep(const Eigen::MatrixXcd& mat) : gram_(mat.adjoint() * mat) {}

  void visit(std::span<const std::size_t> support) {
    const auto s = static_cast<Eigen::Index>(support.size());
    sub_.resize(s, s);
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = 0; j < s; ++j) {
        sub_(i, j) = gram_(static_cast<Eigen::Index>(support[static_cast<std::size_t>(i)]),
                           static_cast<Eigen::Index>(support[static_cast<std::size_t>(j)]));
      }
    }
    solver_.compute(sub_, Eigen::EigenvaluesOnly);
    const auto& ev = solver_.eigenvalues();
    lambda_min_ = std::min(lambda_min_, ev[0]);
    lambda_max_ = std::max(lambda_max_, ev[s - 1]);
    ++examined_;
  }

  RipEstimate finish(HierPattern pattern, RipMode mode) const {
    RipEstimate e{std::move(pattern), 0.0, mode, examined_, lambda_min_, lambda_max_};
    e.delta = std::max({0.0, 1.0 - lambda_min_, lambda_max_ - 1.0});
    return e;
  }

 private:
  Eigen::MatrixXcd gram_;
  Eigen::MatrixXcd sub_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver_;
  double lambda_min_ = 1.0, lambda_max_ = 1.0;
  std::size_t examined_ = 0;
};

}  // namespace

RipEstimate empirical_rip(const Eigen::MatrixXcd& mat, const HierPattern& pattern, RipMode mode,
                          Rng* rng, std::size_t samples) {
  if (pattern.ambient_size() != static_cast<std::size_t>(mat.cols())) {
    raise(ErrorKind::dimension, "pattern size " + std::to_string(pattern.ambient_size()) +
                                    " does not match " + std::to_string(mat.cols()) + " columns");
  }
  GramSweep sweep(mat);
  if (mode == RipMode::exhaustive) {
    for_each_maximal_support(pattern, [&](std::span<const std::size_t> s) { sweep.visit(s); });
  } else {
    if (rng == nullptr) raise(ErrorKind::configuration, "sampled RIP estimate needs a generator");
    for (std::size_t i = 0; i < samples; ++i) {
      const auto s = sample_maximal_support(pattern, *rng);
      sweep.visit(s);
    }
  }
  return sweep.finish(pattern, mode);
}

RipEstimate empirical_rip(const Eigen::MatrixXcd& mat, std::size_t sparsity, RipMode mode,
                          Rng* rng, std::size_t samples) {
  return empirical_rip(mat, HierPattern::flat(static_cast<std::size_t>(mat.cols()), sparsity),
                       mode, rng, samples);
}

Eigen::MatrixXcd kronecker(const std::vector<Eigen::MatrixXcd>& factors) {
  if (factors.empty()) raise(ErrorKind::dimension, "Kronecker product of no factors");
  Eigen::MatrixXcd out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    const auto& b = factors[k];
    Eigen::MatrixXcd next(out.rows() * b.rows(), out.cols() * b.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = out(i, j) * b;
      }
    }
    out = std::move(next);
  }
  return out;
}

Eigen::MatrixXcd normalize_columns(Eigen::MatrixXcd mat) {
  for (Eigen::Index j = 0; j < mat.cols(); ++j) {
    const double n = mat.col(j).norm();
    if (n > 0.0) mat.col(j) /= n;
  }
  return mat;
}

ProductCheck hirip_product_check(const std::vector<Eigen::MatrixXcd>& factors,
                                 const HierPattern& pattern) {
  const auto levels = pattern.levels();
  if (factors.size() != levels.size()) {
    raise(ErrorKind::dimension, "need one factor per pattern level");
  }
  ProductCheck out;
  out.bound = 1.0;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (static_cast<std::size_t>(factors[k].cols()) != levels[k].blocks) {
      raise(ErrorKind::dimension, "factor " + std::to_string(k) + " column count must equal N_k");
    }
    const double d = empirical_rip(factors[k], levels[k].sparsity).delta;
    out.factor_deltas.push_back(d);
    out.bound *= 1.0 + d;
  }
  out.bound -= 1.0;
  out.exact = empirical_rip(kronecker(factors), pattern).delta;
  out.holds = out.exact <= out.bound + kSlack;
  return out;
}

RipFloor kronecker_rip_floor(const std::vector<Eigen::MatrixXcd>& factors,
                             std::size_t total_sparsity) {
  RipFloor out;
  for (const auto& f : factors) {
    const std::size_t s = std::min(total_sparsity, static_cast<std::size_t>(f.cols()));
    out.factor_deltas.push_back(empirical_rip(f, s).delta);
  }
  out.max_factor_delta = *std::max_element(out.factor_deltas.begin(), out.factor_deltas.end());
  out.product_delta = empirical_rip(kronecker(factors), total_sparsity).delta;
  out.holds = out.product_delta >= out.max_factor_delta - kSlack;
  return out;
}

RecoveryConstants theorem1_constants(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    raise(ErrorKind::domain, "recovery constants need 0 <= delta < 1, got " + std::to_string(delta));
  }
  RecoveryConstants c;
  c.delta = delta;
  const double denom = 1.0 - delta * delta;
  c.kappa_printed = std::sqrt(2.0 * delta / denom);
  c.kappa_standard = std::sqrt(2.0 * delta * delta / denom);
  if (c.kappa_printed < 1.0) c.tau_printed = 5.15 / (1.0 - c.kappa_printed);
  if (c.kappa_standard < 1.0) c.tau_standard = 5.15 / (1.0 - c.kappa_standard);
  return c;
}

// ---------------------------------------------------------------------------

double best_sparse_error(const CVector& u, std::size_t terms) {
  std::vector<double> mag(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) mag[static_cast<std::size_t>(i)] = std::norm(u[i]);
  if (terms >= mag.size()) return 0.0;
  std::sort(mag.begin(), mag.end());
  // Smallest first for an accurate tail sum.
  double tail = 0.0;
  for (std::size_t i = 0; i + terms < mag.size(); ++i) tail += mag[i];
  return std::sqrt(tail);
}

double loglog_slope(const std::vector<std::size_t>& k, const std::vector<double>& err) {
  if (k.size() != err.size() || k.size() < 2) raise(ErrorKind::dimension, "slope fit needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!(err[i] > 0.0) || k[i] == 0) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log(static_cast<double>(k[i])), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DecayReport lemma1_decay(KernelKind kind, std::size_t dimension,
                         const std::vector<std::size_t>& k_values,
                         const std::vector<double>& parameters) {
  if (k_values.empty()) raise(ErrorKind::configuration, "need at least one K value");
  const std::size_t k_max = *std::max_element(k_values.begin(), k_values.end());
  if (dimension < 2 * k_max + 1) {
    raise(ErrorKind::dimension, "dimension " + std::to_string(dimension) +
                                    " is below 2 max(K) + 1 = " + std::to_string(2 * k_max + 1));
  }
  DecayReport report;
  report.kind = kind;
  report.dimension = dimension;
  report.k_values = k_values;
  report.worst_errors.assign(k_values.size(), 0.0);
  for (double param : parameters) {
    const CVector u = kind == KernelKind::angle ? dirichlet_angle(param, dimension)
                                                : dirichlet_delay(param, dimension);
    DecayCurve curve;
    curve.parameter = param;
    for (std::size_t i = 0; i < k_values.size(); ++i) {
      curve.errors.push_back(best_sparse_error(u, 2 * k_values[i] + 1));
      report.worst_errors[i] = std::max(report.worst_errors[i], curve.errors.back());
    }
    curve.slope = k_values.size() >= 2 ? loglog_slope(k_values, curve.errors)
                                       : std::numeric_limits<double>::quiet_NaN();
    // Non-increasing along increasing K.
    std::vector<std::size_t> order(k_values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return k_values[a] < k_values[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (curve.errors[order[i]] > curve.errors[order[i - 1]]) curve.monotone = false;
    }
    report.monotone = report.monotone && curve.monotone;
    report.curves.push_back(std::move(curve));
  }
  report.worst_slope = k_values.size() >= 2 ? loglog_slope(k_values, report.worst_errors)
                                            : std::numeric_limits<double>::quiet_NaN();
  return report;
}

Prop1Report prop1_constant_fit(std::size_t antennas, std::size_t subcarriers, std::size_t paths,
                               std::size_t per_angle, const std::vector<std::size_t>& k_theta,
                               const std::vector<std::size_t>& k_tau, std::size_t trials,
                               Rng& rng) {
  if (k_theta.size() != k_tau.size() || k_theta.empty()) {
    raise(ErrorKind::configuration, "K_theta and K_tau sweeps must be non-empty and paired");
  }
  for (std::size_t i = 0; i < k_theta.size(); ++i) {
    if (k_theta[i] == 0 || k_tau[i] == 0) raise(ErrorKind::configuration, "K values must be >= 1");
  }
  const std::size_t k_sep = *std::max_element(k_theta.begin(), k_theta.end());
  const ChannelDims dims{subcarriers, antennas, subcarriers, 1};

  Prop1Report report;
  report.antennas = antennas;
  report.subcarriers = subcarriers;
  report.paths = paths;
  report.per_angle = per_angle;
  report.trials = trials;
  report.rows.resize(k_theta.size());
  for (std::size_t i = 0; i < k_theta.size(); ++i) {
    report.rows[i].k_theta = k_theta[i];
    report.rows[i].k_tau = k_tau[i];
  }

  for (std::size_t trial = 0; trial < trials; ++trial) {
    PathSet ps;
    ps.paths = draw_paths(GridMode::off_grid, paths, per_angle, k_sep, dims, rng);
    ps.gains = draw_gains(paths, 1, rng);
    const HierVector w = build_w(ps, GridMode::off_grid, dims);
    const double gain_sum = ps.gains.cwiseAbs().sum();
    for (std::size_t i = 0; i < k_theta.size(); ++i) {
      const auto omega = rectangle_support(ps.paths, per_angle, k_theta[i], k_tau[i], antennas,
                                           subcarriers, subcarriers);
      const double err = hier_approx_error(w, omega);
      const double kt = static_cast<double>(k_theta[i]), kd = static_cast<double>(k_tau[i]);
      const double ratio = err / ((1.0 / kt + 1.0 / kd) * gain_sum);
      const double sqrt_ratio = err / ((1.0 / std::sqrt(kt) + 1.0 / std::sqrt(kd)) * gain_sum);
      auto& row = report.rows[i];
      row.max_ratio = std::max(row.max_ratio, ratio);
      row.mean_ratio += ratio / static_cast<double>(trials);
      row.max_sqrt_ratio = std::max(row.max_sqrt_ratio, sqrt_ratio);
    }
  }
  report.ratio_increasing = report.rows.size() > 1;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    report.fitted_constant = std::max(report.fitted_constant, report.rows[i].max_ratio);
    report.fitted_sqrt_constant = std::max(report.fitted_sqrt_constant, report.rows[i].max_sqrt_ratio);
    if (i > 0 && !(report.rows[i].max_ratio > report.rows[i - 1].max_ratio)) {
      report.ratio_increasing = false;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json pattern_json(const HierPattern& p) {
  nlohmann::json levels = nlohmann::json::array();
  for (const Level& lv : p.levels()) levels.push_back({lv.blocks, lv.sparsity});
  return levels;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const RipEstimate& e) {
  return {{"pattern", pattern_json(e.sparsity)},
          {"delta", e.delta},
          {"mode", e.mode == RipMode::exhaustive ? "exhaustive" : "sampled"},
          {"supports_examined", e.supports_examined},
          {"lambda_min", e.lambda_min},
          {"lambda_max", e.lambda_max}};
}

nlohmann::json to_json(const ProductCheck& c) {
  return {{"factor_deltas", c.factor_deltas}, {"bound", c.bound}, {"exact", c.exact}, {"holds", c.holds}};
}

nlohmann::json to_json(const RipFloor& f) {
  return {{"factor_deltas", f.factor_deltas},
          {"max_factor_delta", f.max_factor_delta},
          {"product_delta", f.product_delta},
          {"holds", f.holds}};
}

nlohmann::json to_json(const RecoveryConstants& c) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"delta", c.delta},
          {"kappa_printed", c.kappa_printed},
          {"kappa_standard", c.kappa_standard},
          {"tau_printed", opt(c.tau_printed)},
          {"tau_standard", opt(c.tau_standard)}};
}

nlohmann::json to_json(const DecayReport& r) {
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& c : r.curves) {
    curves.push_back({{"parameter", c.parameter},
                      {"errors", c.errors},
                      {"slope", number_or_null(c.slope)},
                      {"monotone", c.monotone}});
  }
  return {{"kind", r.kind == KernelKind::angle ? "angle" : "delay"},
          {"dimension", r.dimension},
          {"k_values", r.k_values},
          {"worst_errors", r.worst_errors},
          {"worst_slope", number_or_null(r.worst_slope)},
          {"monotone", r.monotone},
          {"curves", curves}};
}

nlohmann::json to_json(const Prop1Report& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"k_theta", row.k_theta},
                    {"k_tau", row.k_tau},
                    {"max_ratio", row.max_ratio},
                    {"mean_ratio", row.mean_ratio},
                    {"max_sqrt_ratio", row.max_sqrt_ratio}});
  }
  return {{"antennas", r.antennas},
          {"subcarriers", r.subcarriers},
          {"paths", r.paths},
          {"per_angle", r.per_angle},
          {"trials", r.trials},
          {"rows", rows},
          {"fitted_constant", r.fitted_constant},
          {"fitted_sqrt_constant", r.fitted_sqrt_constant},
          {"ratio_increasing", r.ratio_increasing}};
}

}  // namespace hisparse
