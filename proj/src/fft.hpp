// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace hisparse::detail {

// Unnormalised in-place DFT of fixed length.
//   sign = -1: y_k = sum_n x_n exp(-j 2 pi k n / len)
//   sign = +1: y_k = sum_n x_n exp(+j 2 pi k n / len)
// Plans are shared and immutable; execute() is safe from any thread.
class Dft {
 public:
  static std::shared_ptr<const Dft> get(std::size_t len, int sign);

  Dft(std::size_t len, int sign);
  ~Dft();
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  std::size_t size() const { return len_; }
  void execute(std::complex<double>* data) const;

 private:
  std::size_t len_;
  void* plan_;
};

}  // namespace hisparse::detail
