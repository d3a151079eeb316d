// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include "hisparse/recovery.hpp"

#include <cmath>
#include <string>

#include "hisparse/error.hpp"

namespace hisparse {

namespace {

// In-place restriction of v to the support.
void restrict_to(CVector& v, const HierSupport& support) {
  CVector kept = CVector::Zero(v.size());
  for (std::size_t i : support.indices()) {
    kept[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(i)];
  }
  v.swap(kept);
}

void check_problem(const CVector& x, const MeasurementOperator& op, const HierPattern& pattern) {
  if (static_cast<std::size_t>(x.size()) != op.output_size()) {
    raise(ErrorKind::dimension, "measurement length " + std::to_string(x.size()) +
                                    " does not match operator output " +
                                    std::to_string(op.output_size()));
  }
  if (pattern.ambient_size() != op.input_size()) {
    raise(ErrorKind::dimension, "sparsity pattern size " + std::to_string(pattern.ambient_size()) +
                                    " does not match operator input " +
                                    std::to_string(op.input_size()));
  }
}

// Shared HTP loop; `select` maps a proxy vector to the next support.
template <class Select>
SolveResult pursuit(const CVector& x, const MeasurementOperator& op, const SolverConfig& cfg,
                    const HierPattern& support_pattern, Select select,
                    std::span<const cdouble> truth) {
  cfg.validate();
  if (!truth.empty() && truth.size() != op.input_size()) {
    raise(ErrorKind::dimension, "ground truth length does not match operator input");
  }
  const auto n = static_cast<Eigen::Index>(op.input_size());
  CVector estimate = CVector::Zero(n);
  CVector residual = x;

  auto truth_error = [&](const CVector& w) {
    double e = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) e += std::norm(truth[static_cast<std::size_t>(i)] - w[i]);
    return std::sqrt(e);
  };

  SolveResult result{HierVector(op.input_shape()), HierSupport(support_pattern, {}), 0, x.norm(),
                     true, {}};
  if (!truth.empty()) result.error_history.push_back(truth_error(estimate));

  bool have_support = false;
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    CVector proxy = estimate + op.adjoint(residual);
    HierSupport next = select(proxy);
    if (have_support && cfg.stop_on_stable_support && next == result.support) break;

    LeastSquaresResult ls = restricted_least_squares(op, next, x, cfg.ls_tolerance,
                                                     cfg.ls_max_iterations, &estimate);
    estimate = std::move(ls.coefficients);
    residual = x - op.forward(estimate);
    result.support = std::move(next);
    result.residual_norm = residual.norm();
    result.ls_converged = result.ls_converged && ls.converged;
    result.iterations = it + 1;
    have_support = true;
    if (!truth.empty()) result.error_history.push_back(truth_error(estimate));
  }
  result.estimate = HierVector(op.input_shape(), std::move(estimate));
  return result;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iterations == 0) raise(ErrorKind::configuration, "max_iterations must be >= 1");
  if (ls_max_iterations == 0) raise(ErrorKind::configuration, "ls_max_iterations must be >= 1");
  if (!(ls_tolerance >= 0.0)) raise(ErrorKind::configuration, "ls_tolerance must be >= 0");
}

LeastSquaresResult restricted_least_squares(const MeasurementOperator& op,
                                            const HierSupport& support, const CVector& x,
                                            double tolerance, std::size_t max_iterations,
                                            const CVector* warm_start) {
  if (static_cast<std::size_t>(x.size()) != op.output_size()) {
    raise(ErrorKind::dimension, "measurement length does not match operator output");
  }
  if (support.pattern().ambient_size() != op.input_size()) {
    raise(ErrorKind::dimension, "support does not live in the operator input space");
  }
  const auto n = static_cast<Eigen::Index>(op.input_size());
  LeastSquaresResult out;
  out.underdetermined = support.size() > op.output_size();
  out.coefficients = CVector::Zero(n);

  const double x_norm = x.norm();
  if (support.empty() || x_norm == 0.0) {
    out.residual_norm = x_norm;
    return out;
  }

  // A warm start would leave a null-space component, so the minimum-norm
  // solution of an underdetermined system starts from zero.
  if (warm_start != nullptr && !out.underdetermined) {
    if (warm_start->size() != n) raise(ErrorKind::dimension, "warm start has wrong length");
    out.coefficients = *warm_start;
    restrict_to(out.coefficients, support);
  }

  CVector r = x - op.forward(out.coefficients);
  CVector s = op.adjoint(r);
  restrict_to(s, support);
  CVector p = s;
  double gamma = s.squaredNorm();
  const double target = tolerance * x_norm;

  out.converged = std::sqrt(gamma) <= target;
  while (!out.converged && out.iterations < max_iterations) {
    const CVector q = op.forward(p);
    const double qq = q.squaredNorm();
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    out.coefficients += alpha * p;
    r -= alpha * q;
    s = op.adjoint(r);
    restrict_to(s, support);
    const double gamma_next = s.squaredNorm();
    ++out.iterations;
    if (std::sqrt(gamma_next) <= target) {
      out.converged = true;
      gamma = gamma_next;
      break;
    }
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }
  out.residual_norm = (x - op.forward(out.coefficients)).norm();
  return out;
}

SolveResult hihtp(const CVector& x, const MeasurementOperator& op, const SolverConfig& cfg,
                  std::span<const cdouble> ground_truth) {
  check_problem(x, op, cfg.pattern);
  if (cfg.pattern.shape() != op.input_shape()) {
    raise(ErrorKind::dimension, "pattern block counts must equal (M, D, T)");
  }
  return pursuit(
      x, op, cfg, cfg.pattern,
      [&](const CVector& proxy) {
        return hier_threshold(std::span<const cdouble>(proxy.data(), static_cast<std::size_t>(proxy.size())),
                              cfg.pattern);
      },
      ground_truth);
}

SolveResult htp_baseline(const CVector& x, const MeasurementOperator& op,
                         std::size_t total_sparsity, const SolverConfig& cfg,
                         std::span<const cdouble> ground_truth) {
  check_problem(x, op, cfg.pattern);
  const HierPattern flat = HierPattern::flat(op.input_size(), total_sparsity);
  return pursuit(
      x, op, cfg, flat,
      [&](const CVector& proxy) {
        return hier_threshold(std::span<const cdouble>(proxy.data(), static_cast<std::size_t>(proxy.size())),
                              flat);
      },
      ground_truth);
}

ChannelStack reconstruct_h(const HierVector& w_hat, const SteeringConfig& steering) {
  return assemble_h(w_hat, steering);
}

double channel_mse(const ChannelStack& h, const ChannelStack& h_hat) {
  if (h.size() != h_hat.size() || h.empty()) {
    raise(ErrorKind::dimension, "channel stacks differ in slot count");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < h.size(); ++t) {
    if (h[t].rows() != h_hat[t].rows() || h[t].cols() != h_hat[t].cols()) {
      raise(ErrorKind::dimension, "channel matrices differ in shape");
    }
    total += (h[t] - h_hat[t]).squaredNorm() / static_cast<double>(h[t].size());
  }
  return total / static_cast<double>(h.size());
}

}  // namespace hisparse
