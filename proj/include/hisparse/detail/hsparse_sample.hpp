// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <numeric>
#include <random>

namespace hisparse {

template <class Urbg>
std::vector<std::size_t> sample_maximal_support(const HierPattern& pattern, Urbg& rng) {
  const auto levels = pattern.levels();
  std::vector<std::size_t> prefixes{0};
  for (const Level& level : levels) {
    std::vector<std::size_t> children(level.blocks);
    std::iota(children.begin(), children.end(), std::size_t{0});
    std::vector<std::size_t> next;
    next.reserve(prefixes.size() * level.sparsity);
    std::vector<std::size_t> picked(level.sparsity);
    for (std::size_t prefix : prefixes) {
      std::sample(children.begin(), children.end(), picked.begin(), level.sparsity, rng);
      for (std::size_t c : picked) next.push_back(prefix * level.blocks + c);
    }
    prefixes = std::move(next);
  }
  std::sort(prefixes.begin(), prefixes.end());
  return prefixes;
}

}  // namespace hisparse
