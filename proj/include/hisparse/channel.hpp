// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Wideband multipath channel in the delay-angle domain.
//
// Delays are normalised to the OFDM symbol duration and angles to sin(phi),
// both in [0, 1). On-grid paths sit at (k/N, l/M); off-grid paths leak over
// the grid through Dirichlet kernels and use a square delay dictionary
// (D_eff = N).

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "hisparse/hsparse.hpp"
#include "hisparse/rng.hpp"
#include "hisparse/sensing.hpp"

namespace hisparse {

enum class GridMode { on_grid, off_grid };

struct PathParams {
  double delay = 0.0;  // tau / T_s
  double angle = 0.0;  // sin(phi)
};

struct PathSet {
  std::vector<PathParams> paths;
  Eigen::MatrixXcd gains;  // L x T, rho_p(t)

  std::size_t path_count() const { return paths.size(); }
};

struct ChannelDims {
  std::size_t subcarriers = 64;  // N
  std::size_t antennas = 16;     // M
  std::size_t delay_taps = 16;   // D, delay spread of the on-grid model
  std::size_t slots = 1;         // T

  /// Delay dictionary size: D on-grid, N off-grid.
  std::size_t dictionary_taps(GridMode mode) const {
    return mode == GridMode::on_grid ? delay_taps : subcarriers;
  }
  SteeringConfig steering(GridMode mode) const {
    return {subcarriers, antennas, dictionary_taps(mode)};
  }
};

/// Space-frequency channel, one N x M matrix per slot.
using ChannelStack = std::vector<Eigen::MatrixXcd>;

struct ChannelRealization {
  GridMode mode = GridMode::on_grid;
  PathSet paths;
  HierVector w_true;  // shape (M, D_eff, T)
  ChannelStack h_true;
};

/// (u_theta)_i = sin(pi M xi_i) / (M sin(pi xi_i)) exp(-j pi (M-1) xi_i),
/// xi_i = theta - i/M. Unit norm; equals e_k when theta = k/M.
CVector dirichlet_angle(double theta, std::size_t antennas);
/// Same kernel over the N-point delay grid.
CVector dirichlet_delay(double tau, std::size_t subcarriers);

/// Wrap-around distance on the unit circle [0, 1).
double circular_distance(double a, double b);

/// Path delays/angles. On-grid: delays uniform on {k/N : k < D}, angles
/// uniform on {l/M} without repetition. Off-grid: continuous uniform draws
/// (delays in [0, D/N)), rejection-sampled until distinct angles are at
/// least 2 K_theta / M apart and no angle carries more than K paths.
std::vector<PathParams> draw_paths(GridMode mode, std::size_t paths, std::size_t per_angle,
                                   std::size_t k_theta, const ChannelDims& dims, Rng& rng);

/// L x T i.i.d. CN(0, 1/L) gains, so total expected power is one per slot.
Eigen::MatrixXcd draw_gains(std::size_t paths, std::size_t slots, Rng& rng);

/// Delay-angle coefficients W-bar with shape (M, D_eff, T).
HierVector build_w(const PathSet& paths, GridMode mode, const ChannelDims& dims);

/// H(t) = F_{N,D} W(t) F_M^H for every slot.
ChannelStack assemble_h(const HierVector& w, const SteeringConfig& steering);

/// H(t) = sum_p rho_p(t) b(tau_p) a(theta_p)^H evaluated directly from the
/// continuous steering vectors.
ChannelStack direct_channel(const PathSet& paths, std::size_t subcarriers, std::size_t antennas);

/// Noisy pilot observations X-bar = (1/sqrt(O)) vec(P_tau (H(t) + Z(t)) P_theta^T),
/// Z entries i.i.d. CN(0, sigma2), laid out like MeasurementOperator output.
CVector observe(const ChannelStack& h, double sigma2, const SamplingPattern& freq,
                const SamplingPattern& space, Rng& rng);

/// Draws paths and gains and assembles W-bar and H.
ChannelRealization draw_channel(GridMode mode, std::size_t paths, std::size_t per_angle,
                                std::size_t k_theta, const ChannelDims& dims, Rng& rng);

// ---------------------------------------------------------------------------
// Rectangle support around path locations.

struct IndexRectangle {
  std::size_t path = 0;
  std::size_t angle_center = 0;
  std::size_t delay_center = 0;
  std::vector<std::size_t> angle_indices;  // wrapped mod M
  std::vector<std::size_t> delay_indices;  // wrapped mod D_eff
};

struct RectangleSupport {
  std::vector<IndexRectangle> rectangles;
  /// Union over paths, 2-level support on the (M, D_eff) grid with pattern
  /// ((M, L(2K_theta+1)), (D_eff, K(2K_tau+1))), sparsities clipped to the
  /// block counts.
  HierSupport support;
};

/// Angle windows that would overlap between distinct angles are split, each
/// boundary column going to the path whose angle is closer. Throws a
/// configuration error when the angular separation or delays-per-angle
/// condition is violated.
RectangleSupport rectangle_support(const std::vector<PathParams>& paths, std::size_t per_angle,
                                   std::size_t k_theta, std::size_t k_tau, std::size_t antennas,
                                   std::size_t delay_taps, std::size_t subcarriers);

/// ||W-bar - W-bar restricted to (all slots) x Omega||.
double hier_approx_error(const HierVector& w, const RectangleSupport& omega);

}  // namespace hisparse
