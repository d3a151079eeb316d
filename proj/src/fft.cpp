// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace hisparse::detail {

namespace {

// FFTW planning is not thread-safe; executing an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Dft::Dft(std::size_t len, int sign) : len_(len), plan_(nullptr) {
  std::vector<std::complex<double>> scratch(len);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  plan_ = fftw_plan_dft_1d(static_cast<int>(len), buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Dft::~Dft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void Dft::execute(std::complex<double>* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_), buf, buf);
}

std::shared_ptr<const Dft> Dft::get(std::size_t len, int sign) {
  // Mutex first so it outlives the cache during static destruction.
  std::mutex& mutex = planner_mutex();
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const Dft>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{len, sign < 0 ? -1 : 1}];
  if (!slot) slot = std::make_shared<const Dft>(len, sign);
  return slot;
}

}  // namespace hisparse::detail
