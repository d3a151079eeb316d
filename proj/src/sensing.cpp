// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include "hisparse/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "hisparse/error.hpp"

namespace hisparse {

void SteeringConfig::validate() const {
  if (subcarriers == 0 || antennas == 0 || delay_taps == 0) {
    raise(ErrorKind::dimension, "steering dimensions must be positive");
  }
  if (delay_taps > subcarriers) {
    raise(ErrorKind::dimension, "delay taps D=" + std::to_string(delay_taps) +
                                    " exceed subcarriers N=" + std::to_string(subcarriers));
  }
}

SamplingPattern::SamplingPattern(std::size_t ambient, std::vector<std::size_t> selected)
    : ambient_(ambient), selected_(std::move(selected)) {
  if (selected_.size() > ambient_) {
    raise(ErrorKind::dimension, "cannot select " + std::to_string(selected_.size()) + " of " +
                                    std::to_string(ambient_) + " indices");
  }
  for (std::size_t i = 0; i < selected_.size(); ++i) {
    if (selected_[i] >= ambient_ || (i > 0 && selected_[i] <= selected_[i - 1])) {
      raise(ErrorKind::dimension, "sampling indices must be strictly increasing and below " +
                                      std::to_string(ambient_));
    }
  }
}

SamplingPattern SamplingPattern::full(std::size_t ambient) {
  std::vector<std::size_t> all(ambient);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return SamplingPattern(ambient, std::move(all));
}

Eigen::MatrixXcd dft_steering(std::size_t rows, std::size_t cols) {
  if (cols > rows) {
    raise(ErrorKind::dimension, "DFT steering needs cols <= rows, got " + std::to_string(rows) +
                                    "x" + std::to_string(cols));
  }
  Eigen::MatrixXcd f(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t k = 0; k < cols; ++k) {
      // Reduce m*k mod n first so the phase stays accurate for large n.
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((m * k) % rows) /
                           static_cast<double>(rows);
      f(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = std::polar(1.0, phase);
    }
  }
  return f;
}

SamplingPattern draw_sampling(std::size_t ambient, std::size_t count, Rng& rng) {
  if (count > ambient) {
    raise(ErrorKind::dimension,
          "cannot sample " + std::to_string(count) + " of " + std::to_string(ambient));
  }
  std::vector<std::size_t> all(ambient), picked(count);
  std::iota(all.begin(), all.end(), std::size_t{0});
  // Selection sampling keeps the input order, so the result is sorted.
  std::sample(all.begin(), all.end(), picked.begin(), count, rng);
  return SamplingPattern(ambient, std::move(picked));
}

// ---------------------------------------------------------------------------

MeasurementOperator::MeasurementOperator(SteeringConfig steering, SamplingPattern freq,
                                         SamplingPattern space, std::size_t slots)
    : steering_(steering), freq_(std::move(freq)), space_(std::move(space)), slots_(slots) {
  steering_.validate();
  if (freq_.ambient() != steering_.subcarriers) {
    raise(ErrorKind::dimension, "frequency pattern must sample from N subcarriers");
  }
  if (space_.ambient() != steering_.antennas) {
    raise(ErrorKind::dimension, "space pattern must sample from M antennas");
  }
  if (freq_.size() == 0 || space_.size() == 0 || slots_ == 0) {
    raise(ErrorKind::dimension, "operator needs at least one subcarrier, antenna and slot");
  }
  scale_ = 1.0 / std::sqrt(static_cast<double>(freq_.size() * space_.size()));
  freq_fwd_ = detail::Dft::get(steering_.subcarriers, -1);
  freq_bwd_ = detail::Dft::get(steering_.subcarriers, +1);
  space_fwd_ = detail::Dft::get(steering_.antennas, -1);
  space_bwd_ = detail::Dft::get(steering_.antennas, +1);
}

std::size_t MeasurementOperator::input_size() const {
  return steering_.antennas * steering_.delay_taps * slots_;
}

std::size_t MeasurementOperator::output_size() const {
  return freq_.size() * space_.size() * slots_;
}

std::vector<std::size_t> MeasurementOperator::input_shape() const {
  return {steering_.antennas, steering_.delay_taps, slots_};
}

CVector MeasurementOperator::forward(const CVector& w) const {
  CVector out(static_cast<Eigen::Index>(output_size()));
  forward(std::span<const cdouble>(w.data(), static_cast<std::size_t>(w.size())),
          std::span<cdouble>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

CVector MeasurementOperator::adjoint(const CVector& x) const {
  CVector out(static_cast<Eigen::Index>(input_size()));
  adjoint(std::span<const cdouble>(x.data(), static_cast<std::size_t>(x.size())),
          std::span<cdouble>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

void MeasurementOperator::forward(std::span<const cdouble> w, std::span<cdouble> out) const {
  if (w.size() != input_size() || out.size() != output_size()) {
    raise(ErrorKind::dimension, "forward: expected input " + std::to_string(input_size()) +
                                    " and output " + std::to_string(output_size()) + ", got " +
                                    std::to_string(w.size()) + " and " +
                                    std::to_string(out.size()));
  }
  const std::size_t n = steering_.subcarriers, m_count = steering_.antennas,
                    d_count = steering_.delay_taps, T = slots_;
  const std::size_t o_tau = freq_.size(), o_theta = space_.size();

  std::vector<cdouble> col(n), row(m_count);
  std::vector<cdouble> partial(o_tau * m_count);  // P_tau F_{N,D} W(t), row-major
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t m = 0; m < m_count; ++m) {
      bool nonzero = false;
      std::fill(col.begin(), col.end(), cdouble{});
      for (std::size_t d = 0; d < d_count; ++d) {
        col[d] = w[(m * d_count + d) * T + t];
        nonzero = nonzero || col[d] != cdouble{};
      }
      if (nonzero) freq_fwd_->execute(col.data());
      for (std::size_t o = 0; o < o_tau; ++o) partial[o * m_count + m] = col[freq_[o]];
    }
    for (std::size_t o = 0; o < o_tau; ++o) {
      std::copy_n(partial.begin() + static_cast<std::ptrdiff_t>(o * m_count), m_count, row.begin());
      // Right-multiplication by F_M^H is the unnormalised inverse DFT.
      space_bwd_->execute(row.data());
      for (std::size_t a = 0; a < o_theta; ++a) out[(a * o_tau + o) * T + t] = scale_ * row[space_[a]];
    }
  }
}

void MeasurementOperator::adjoint(std::span<const cdouble> x, std::span<cdouble> out) const {
  if (x.size() != output_size() || out.size() != input_size()) {
    raise(ErrorKind::dimension, "adjoint: expected input " + std::to_string(output_size()) +
                                    " and output " + std::to_string(input_size()) + ", got " +
                                    std::to_string(x.size()) + " and " +
                                    std::to_string(out.size()));
  }
  const std::size_t n = steering_.subcarriers, m_count = steering_.antennas,
                    d_count = steering_.delay_taps, T = slots_;
  const std::size_t o_tau = freq_.size(), o_theta = space_.size();

  std::vector<cdouble> col(n), row(m_count);
  std::vector<cdouble> partial(o_tau * m_count);  // X(t) P_theta F_M, row-major
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t o = 0; o < o_tau; ++o) {
      std::fill(row.begin(), row.end(), cdouble{});
      for (std::size_t a = 0; a < o_theta; ++a) row[space_[a]] = x[(a * o_tau + o) * T + t];
      space_fwd_->execute(row.data());
      std::copy(row.begin(), row.end(), partial.begin() + static_cast<std::ptrdiff_t>(o * m_count));
    }
    for (std::size_t m = 0; m < m_count; ++m) {
      std::fill(col.begin(), col.end(), cdouble{});
      for (std::size_t o = 0; o < o_tau; ++o) col[freq_[o]] = partial[o * m_count + m];
      // F_{N,D}^H: inverse DFT, keep the first D taps.
      freq_bwd_->execute(col.data());
      for (std::size_t d = 0; d < d_count; ++d) out[(m * d_count + d) * T + t] = scale_ * col[d];
    }
  }
}

Eigen::MatrixXcd dense_build(const MeasurementOperator& op) {
  const double rows = static_cast<double>(op.output_size());
  const double cols = static_cast<double>(op.input_size());
  if (rows * cols > kMaxDenseEntries) {
    raise(ErrorKind::capacity, "dense operator would have " + std::to_string(rows * cols) +
                                   " entries (limit 1e7)");
  }
  const auto& st = op.steering();
  const auto& freq = op.freq_pattern();
  const auto& space = op.space_pattern();
  const std::size_t T = op.slots(), D = st.delay_taps, o_tau = freq.size();
  const Eigen::MatrixXcd f_tau = dft_steering(st.subcarriers, D);
  const Eigen::MatrixXcd f_theta = dft_steering(st.antennas, st.antennas);

  Eigen::MatrixXcd psi_bar = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(op.output_size()),
                                                    static_cast<Eigen::Index>(op.input_size()));
  for (std::size_t a = 0; a < space.size(); ++a) {
    for (std::size_t o = 0; o < o_tau; ++o) {
      for (std::size_t m = 0; m < st.antennas; ++m) {
        for (std::size_t d = 0; d < D; ++d) {
          const cdouble v = op.scale() *
                            std::conj(f_theta(static_cast<Eigen::Index>(space[a]), static_cast<Eigen::Index>(m))) *
                            f_tau(static_cast<Eigen::Index>(freq[o]), static_cast<Eigen::Index>(d));
          for (std::size_t t = 0; t < T; ++t) {
            psi_bar(static_cast<Eigen::Index>((a * o_tau + o) * T + t),
                    static_cast<Eigen::Index>((m * D + d) * T + t)) = v;
          }
        }
      }
    }
  }
  return psi_bar;
}

}  // namespace hisparse
