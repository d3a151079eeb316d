// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Named analysis studies with JSON parameters and JSON reports, shared by
// the C API and the command line tool.

#include <cstdint>
#include <string_view>

#include <json.hpp>

#include "hisparse/analysis.hpp"

namespace hisparse {

struct HiripStudy {
  std::size_t instances = 0;
  std::size_t holding = 0;
  double worst_gap = 0.0;  // max of exact - bound, negative when all hold
  std::vector<ProductCheck> checks;
};

/// Product-bound checks on seeded random Kronecker instances. Each factor
/// has `rows` x `cols` complex Gaussian entries with normalized columns.
HiripStudy hirip_study(std::size_t instances, std::uint64_t seed, std::size_t factors,
                       std::size_t rows, std::size_t cols, std::size_t sparsity);

/// study: lemma1, prop1, hirip, theorem1. Unknown parameters raise a
/// configuration error naming the key.
nlohmann::json run_study(std::string_view study, const nlohmann::json& params);

}  // namespace hisparse
