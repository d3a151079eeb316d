// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Kronecker-structured measurement operator for multi-slot OFDM pilots.
//
// Index conventions shared by the whole library:
//   coefficients  W-bar: flat index (m * D + d) * T + t   (angle, delay, slot)
//   measurements  X-bar: flat index (o_theta * O_tau + o_tau) * T + t
// Slot is innermost, so the operator is literally Psi (x) I_T.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hisparse/hsparse.hpp"
#include "hisparse/rng.hpp"

namespace hisparse {

namespace detail {
class Dft;
}

struct SteeringConfig {
  std::size_t subcarriers = 0;  // N
  std::size_t antennas = 0;     // M
  std::size_t delay_taps = 0;   // D <= N

  /// Throws a dimension error on zero sizes or D > N.
  void validate() const;
  bool operator==(const SteeringConfig&) const = default;
};

/// Sorted, unique subset of [0, ambient).
class SamplingPattern {
 public:
  SamplingPattern(std::size_t ambient, std::vector<std::size_t> selected);
  static SamplingPattern full(std::size_t ambient);

  std::size_t ambient() const { return ambient_; }
  std::size_t size() const { return selected_.size(); }
  std::span<const std::size_t> selected() const { return selected_; }
  std::size_t operator[](std::size_t i) const { return selected_[i]; }

  bool operator==(const SamplingPattern&) const = default;

 private:
  std::size_t ambient_;
  std::vector<std::size_t> selected_;
};

/// (F_{n,d})_{m,k} = exp(-j 2 pi m k / n). Throws if d > n.
Eigen::MatrixXcd dft_steering(std::size_t rows, std::size_t cols);

/// Uniformly random `count`-subset of [0, ambient).
SamplingPattern draw_sampling(std::size_t ambient, std::size_t count, Rng& rng);

/// Matrix-free Psi-bar = Psi (x) I_T with
///   Psi = (P_theta conj(F_M) / sqrt(O_theta)) (x) (P_tau F_{N,D} / sqrt(O_tau)).
/// Per slot the forward map is W(t) -> P_tau F_{N,D} W(t) F_M^H P_theta^T / sqrt(O),
/// evaluated with FFTs. Immutable after construction; forward/adjoint are
/// reentrant.
class MeasurementOperator {
 public:
  MeasurementOperator(SteeringConfig steering, SamplingPattern freq, SamplingPattern space,
                      std::size_t slots);

  const SteeringConfig& steering() const { return steering_; }
  const SamplingPattern& freq_pattern() const { return freq_; }
  const SamplingPattern& space_pattern() const { return space_; }
  std::size_t slots() const { return slots_; }
  double scale() const { return scale_; }

  std::size_t input_size() const;
  std::size_t output_size() const;
  /// (M, D, T), the hierarchical shape of the coefficient vector.
  std::vector<std::size_t> input_shape() const;

  CVector forward(const CVector& w) const;
  CVector adjoint(const CVector& x) const;

  void forward(std::span<const cdouble> w, std::span<cdouble> out) const;
  void adjoint(std::span<const cdouble> x, std::span<cdouble> out) const;

 private:
  SteeringConfig steering_;
  SamplingPattern freq_;
  SamplingPattern space_;
  std::size_t slots_;
  double scale_;
  std::shared_ptr<const detail::Dft> freq_fwd_, freq_bwd_, space_fwd_, space_bwd_;
};

inline constexpr double kMaxDenseEntries = 1e7;

/// Explicit Psi-bar for small instances. Capacity error above 1e7 entries.
Eigen::MatrixXcd dense_build(const MeasurementOperator& op);

}  // namespace hisparse
