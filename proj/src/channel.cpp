// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include "hisparse/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <string>

#include "hisparse/error.hpp"

namespace hisparse {

namespace {

constexpr double kSingularSine = 1e-12;
constexpr std::size_t kRejectionBudget = 10000;
constexpr double kGridTolerance = 1e-9;

CVector dirichlet(double x, std::size_t n) {
  const double nd = static_cast<double>(n);
  CVector u(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x - static_cast<double>(i) / nd;
    const double s = std::sin(std::numbers::pi * xi);
    const cdouble phase = std::polar(1.0, -std::numbers::pi * (nd - 1.0) * xi);
    double ratio;
    if (std::abs(s) < kSingularSine) {
      // sin(pi n xi) / (n sin(pi xi)) -> (-1)^{q(n-1)} as xi -> q.
      const long q = std::lround(xi);
      ratio = ((q * static_cast<long>(n - 1)) % 2 == 0) ? 1.0 : -1.0;
    } else {
      ratio = std::sin(std::numbers::pi * nd * xi) / (nd * s);
    }
    u[static_cast<Eigen::Index>(i)] = ratio * phase;
  }
  return u;
}

// Nearest grid index on a circular n-point grid.
std::size_t nearest_index(double x, std::size_t n) {
  const long k = std::lround(x * static_cast<double>(n));
  const long nn = static_cast<long>(n);
  return static_cast<std::size_t>(((k % nn) + nn) % nn);
}

bool on_grid_value(double x, std::size_t n, std::size_t limit, std::size_t& index) {
  const double scaled = x * static_cast<double>(n);
  const double r = std::round(scaled);
  if (std::abs(scaled - r) > kGridTolerance || r < 0.0 || r >= static_cast<double>(limit)) {
    return false;
  }
  index = static_cast<std::size_t>(r);
  return true;
}

// Groups path indices by exactly equal angle, in first-appearance order.
std::vector<std::vector<std::size_t>> group_by_angle(const std::vector<PathParams>& paths) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<double> angles;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    auto it = std::find(angles.begin(), angles.end(), paths[p].angle);
    if (it == angles.end()) {
      angles.push_back(paths[p].angle);
      groups.push_back({p});
    } else {
      groups[static_cast<std::size_t>(it - angles.begin())].push_back(p);
    }
  }
  return groups;
}

bool separated(const std::vector<PathParams>& paths, double min_gap) {
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      if (paths[i].angle != paths[j].angle &&
          circular_distance(paths[i].angle, paths[j].angle) < min_gap) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::size_t> window(std::size_t center, std::size_t half, std::size_t n) {
  if (2 * half + 1 >= n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  std::vector<std::size_t> out;
  out.reserve(2 * half + 1);
  for (std::size_t k = 0; k < 2 * half + 1; ++k) out.push_back((center + n - half + k) % n);
  return out;
}

}  // namespace

CVector dirichlet_angle(double theta, std::size_t antennas) { return dirichlet(theta, antennas); }

CVector dirichlet_delay(double tau, std::size_t subcarriers) { return dirichlet(tau, subcarriers); }

double circular_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 1.0);
  return std::min(d, 1.0 - d);
}

std::vector<PathParams> draw_paths(GridMode mode, std::size_t paths, std::size_t per_angle,
                                   std::size_t k_theta, const ChannelDims& dims, Rng& rng) {
  const std::size_t n = dims.subcarriers, m = dims.antennas, d = dims.delay_taps;
  if (paths == 0) raise(ErrorKind::configuration, "need at least one path");
  if (per_angle == 0) raise(ErrorKind::configuration, "delays-per-angle K must be >= 1");
  if (n == 0 || m == 0 || d == 0 || d > n) {
    raise(ErrorKind::configuration, "invalid channel dimensions");
  }
  std::vector<PathParams> out(paths);
  if (mode == GridMode::on_grid) {
    if (paths > m) {
      raise(ErrorKind::configuration, "on-grid draw needs L <= M distinct angles, got L=" +
                                          std::to_string(paths) + ", M=" + std::to_string(m));
    }
    std::vector<std::size_t> angles(m);
    std::iota(angles.begin(), angles.end(), std::size_t{0});
    std::uniform_int_distribution<std::size_t> delay_dist(0, d - 1);
    // Partial Fisher-Yates: first L entries become a uniform ordered draw.
    for (std::size_t p = 0; p < paths; ++p) {
      std::uniform_int_distribution<std::size_t> pick(p, m - 1);
      std::swap(angles[p], angles[pick(rng)]);
      out[p].angle = static_cast<double>(angles[p]) / static_cast<double>(m);
      out[p].delay = static_cast<double>(delay_dist(rng)) / static_cast<double>(n);
    }
    return out;
  }

  if (paths > 1 && 2 * k_theta * paths >= m) {
    raise(ErrorKind::configuration,
          "angular separation infeasible: L * 2K_theta / M = " +
              std::to_string(static_cast<double>(2 * k_theta * paths) / static_cast<double>(m)) +
              " must be < 1");
  }
  const double min_gap = 2.0 * static_cast<double>(k_theta) / static_cast<double>(m);
  const double max_delay = static_cast<double>(d) / static_cast<double>(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t attempt = 0; attempt < kRejectionBudget; ++attempt) {
    for (auto& p : out) {
      p.delay = unit(rng) * max_delay;
      p.angle = unit(rng);
    }
    // Continuous angles are almost surely distinct, so at most one path per
    // angle and the delays-per-angle condition holds for any K >= 1.
    if (separated(out, min_gap)) return out;
  }
  raise(ErrorKind::capacity, "off-grid path draw exceeded 10000 rejection attempts");
}

Eigen::MatrixXcd draw_gains(std::size_t paths, std::size_t slots, Rng& rng) {
  if (paths == 0 || slots == 0) raise(ErrorKind::configuration, "gains need L, T >= 1");
  Eigen::MatrixXcd g(static_cast<Eigen::Index>(paths), static_cast<Eigen::Index>(slots));
  const double variance = 1.0 / static_cast<double>(paths);
  for (Eigen::Index t = 0; t < g.cols(); ++t) {
    for (Eigen::Index p = 0; p < g.rows(); ++p) g(p, t) = complex_normal(rng, variance);
  }
  return g;
}

HierVector build_w(const PathSet& paths, GridMode mode, const ChannelDims& dims) {
  const std::size_t m_count = dims.antennas, T = dims.slots;
  const std::size_t d_eff = dims.dictionary_taps(mode);
  if (static_cast<std::size_t>(paths.gains.rows()) != paths.path_count() ||
      static_cast<std::size_t>(paths.gains.cols()) != T) {
    raise(ErrorKind::dimension, "gain matrix must be L x T");
  }
  HierVector w({m_count, d_eff, T});
  for (std::size_t p = 0; p < paths.path_count(); ++p) {
    const PathParams& path = paths.paths[p];
    if (mode == GridMode::on_grid) {
      std::size_t k = 0, l = 0;
      if (!on_grid_value(path.delay, dims.subcarriers, d_eff, k) ||
          !on_grid_value(path.angle, m_count, m_count, l)) {
        raise(ErrorKind::configuration,
              "path " + std::to_string(p) + " is not on the delay/angle grid");
      }
      for (std::size_t t = 0; t < T; ++t) {
        w[(l * d_eff + k) * T + t] += paths.gains(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(t));
      }
    } else {
      const CVector u_tau = dirichlet_delay(path.delay, d_eff);
      const CVector u_theta = dirichlet_angle(path.angle, m_count);
      for (std::size_t m = 0; m < m_count; ++m) {
        const cdouble a = std::conj(u_theta[static_cast<Eigen::Index>(m)]);
        for (std::size_t d = 0; d < d_eff; ++d) {
          const cdouble outer = u_tau[static_cast<Eigen::Index>(d)] * a;
          for (std::size_t t = 0; t < T; ++t) {
            w[(m * d_eff + d) * T + t] +=
                paths.gains(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(t)) * outer;
          }
        }
      }
    }
  }
  return w;
}

ChannelStack assemble_h(const HierVector& w, const SteeringConfig& steering) {
  steering.validate();
  const auto& shape = w.shape();
  if (shape.size() != 3 || shape[0] != steering.antennas || shape[1] != steering.delay_taps) {
    raise(ErrorKind::dimension, "coefficient shape must be (M, D, T) matching the steering");
  }
  const std::size_t m_count = shape[0], d_count = shape[1], T = shape[2];
  const Eigen::MatrixXcd a_tau = dft_steering(steering.subcarriers, d_count);
  const Eigen::MatrixXcd a_theta_h = dft_steering(m_count, m_count).adjoint();
  ChannelStack h;
  h.reserve(T);
  Eigen::MatrixXcd wt(static_cast<Eigen::Index>(d_count), static_cast<Eigen::Index>(m_count));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t m = 0; m < m_count; ++m) {
      for (std::size_t d = 0; d < d_count; ++d) {
        wt(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m)) = w[(m * d_count + d) * T + t];
      }
    }
    h.push_back(a_tau * wt * a_theta_h);
  }
  return h;
}

ChannelStack direct_channel(const PathSet& paths, std::size_t subcarriers, std::size_t antennas) {
  const std::size_t T = static_cast<std::size_t>(paths.gains.cols());
  ChannelStack h(T, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(subcarriers),
                                           static_cast<Eigen::Index>(antennas)));
  for (std::size_t p = 0; p < paths.path_count(); ++p) {
    CVector b(static_cast<Eigen::Index>(subcarriers)), a(static_cast<Eigen::Index>(antennas));
    for (std::size_t k = 0; k < subcarriers; ++k) {
      b[static_cast<Eigen::Index>(k)] =
          std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) * paths.paths[p].delay);
    }
    for (std::size_t k = 0; k < antennas; ++k) {
      a[static_cast<Eigen::Index>(k)] =
          std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) * paths.paths[p].angle);
    }
    const Eigen::MatrixXcd outer = b * a.adjoint();
    for (std::size_t t = 0; t < T; ++t) {
      h[t] += paths.gains(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(t)) * outer;
    }
  }
  return h;
}

CVector observe(const ChannelStack& h, double sigma2, const SamplingPattern& freq,
                const SamplingPattern& space, Rng& rng) {
  if (sigma2 < 0.0) raise(ErrorKind::domain, "noise variance must be non-negative");
  const std::size_t T = h.size(), o_tau = freq.size(), o_theta = space.size();
  for (const auto& ht : h) {
    if (static_cast<std::size_t>(ht.rows()) != freq.ambient() ||
        static_cast<std::size_t>(ht.cols()) != space.ambient()) {
      raise(ErrorKind::dimension, "channel matrix does not match sampling patterns");
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(o_tau * o_theta));
  CVector x(static_cast<Eigen::Index>(o_tau * o_theta * T));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t a = 0; a < o_theta; ++a) {
      for (std::size_t o = 0; o < o_tau; ++o) {
        cdouble y = h[t](static_cast<Eigen::Index>(freq[o]), static_cast<Eigen::Index>(space[a]));
        if (sigma2 > 0.0) y += complex_normal(rng, sigma2);
        x[static_cast<Eigen::Index>((a * o_tau + o) * T + t)] = scale * y;
      }
    }
  }
  return x;
}

ChannelRealization draw_channel(GridMode mode, std::size_t paths, std::size_t per_angle,
                                std::size_t k_theta, const ChannelDims& dims, Rng& rng) {
  PathSet set;
  set.paths = draw_paths(mode, paths, per_angle, k_theta, dims, rng);
  set.gains = draw_gains(paths, dims.slots, rng);
  HierVector w = build_w(set, mode, dims);
  ChannelStack h = assemble_h(w, dims.steering(mode));
  return ChannelRealization{mode, std::move(set), std::move(w), std::move(h)};
}

// ---------------------------------------------------------------------------

RectangleSupport rectangle_support(const std::vector<PathParams>& paths, std::size_t per_angle,
                                   std::size_t k_theta, std::size_t k_tau, std::size_t antennas,
                                   std::size_t delay_taps, std::size_t subcarriers) {
  if (paths.empty()) raise(ErrorKind::configuration, "rectangle support needs at least one path");
  if (antennas == 0 || delay_taps == 0 || subcarriers == 0) {
    raise(ErrorKind::dimension, "rectangle support needs positive dimensions");
  }
  const double min_gap = 2.0 * static_cast<double>(k_theta) / static_cast<double>(antennas);
  if (!separated(paths, min_gap - 1e-12)) {
    raise(ErrorKind::configuration, "angular separation condition violated");
  }
  const auto groups = group_by_angle(paths);
  for (const auto& g : groups) {
    if (g.size() > per_angle) {
      raise(ErrorKind::configuration, "more than K=" + std::to_string(per_angle) +
                                          " paths share one angle");
    }
  }

  // Angle columns claimed by each distinct angle; overlapping boundary
  // columns go to the closer angle (lower group on ties).
  std::vector<std::size_t> owner(antennas, SIZE_MAX);
  std::vector<double> owner_distance(antennas, 0.0);
  std::vector<std::vector<std::size_t>> group_window(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double theta = paths[groups[g].front()].angle;
    group_window[g] = window(nearest_index(theta, antennas), k_theta, antennas);
    for (std::size_t j : group_window[g]) {
      const double dist = circular_distance(theta, static_cast<double>(j) / static_cast<double>(antennas));
      if (owner[j] == SIZE_MAX || dist < owner_distance[j]) {
        owner[j] = g;
        owner_distance[j] = dist;
      }
    }
  }

  RectangleSupport out{{}, HierSupport(HierPattern::flat(1, 1), {})};
  std::vector<std::size_t> flat;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<std::size_t> cols;
    for (std::size_t j : group_window[g]) {
      if (owner[j] == g) cols.push_back(j);
    }
    for (std::size_t p : groups[g]) {
      IndexRectangle rect;
      rect.path = p;
      rect.angle_center = nearest_index(paths[p].angle, antennas);
      rect.delay_center = nearest_index(paths[p].delay, subcarriers) % delay_taps;
      rect.angle_indices = cols;
      rect.delay_indices = window(rect.delay_center, k_tau, delay_taps);
      for (std::size_t j : rect.angle_indices) {
        for (std::size_t d : rect.delay_indices) flat.push_back(j * delay_taps + d);
      }
      out.rectangles.push_back(std::move(rect));
    }
  }
  std::sort(out.rectangles.begin(), out.rectangles.end(),
            [](const IndexRectangle& a, const IndexRectangle& b) { return a.path < b.path; });

  const std::size_t s_angle = std::min(antennas, paths.size() * (2 * k_theta + 1));
  const std::size_t s_delay = std::min(delay_taps, per_angle * (2 * k_tau + 1));
  out.support = HierSupport(HierPattern({{antennas, s_angle}, {delay_taps, s_delay}}), std::move(flat));
  return out;
}

double hier_approx_error(const HierVector& w, const RectangleSupport& omega) {
  const auto& shape = w.shape();
  const auto grid = omega.support.pattern().shape();
  if (shape.size() != 3 || grid.size() != 2 || shape[0] != grid[0] || shape[1] != grid[1]) {
    raise(ErrorKind::dimension, "rectangle support does not match coefficient shape");
  }
  const std::size_t T = shape[2];
  double outside = 0.0;
  std::size_t next = 0;
  const auto idx = omega.support.indices();
  for (std::size_t cell = 0; cell < shape[0] * shape[1]; ++cell) {
    if (next < idx.size() && idx[next] == cell) {
      ++next;
      continue;
    }
    for (std::size_t t = 0; t < T; ++t) outside += std::norm(w[cell * T + t]);
  }
  return std::sqrt(outside);
}

}  // namespace hisparse
