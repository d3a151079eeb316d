// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace hisparse {

using Rng = std::mt19937_64;

/// Mixes a master seed with integer coordinates (cell indices, trial number)
/// into a child seed. Distinct coordinate tuples give decorrelated streams.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> coords);

/// Circularly-symmetric complex Gaussian sample, E|z|^2 = variance.
std::complex<double> complex_normal(Rng& rng, double variance);

}  // namespace hisparse
