// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Hierarchically sparse vectors.
//
// A vector of length N_1 * ... * N_l is viewed as N_1 blocks, each of which
// is N_2 blocks, and so on; level l is innermost, so the flat index of the
// multi-index (i_1, ..., i_l) is (((i_1 * N_2) + i_2) * N_3 + ...) + i_l.
// It is (s_1, ..., s_l)-sparse when at most s_1 top-level blocks are nonzero
// and every nonzero block is recursively (s_2, ..., s_l)-sparse.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace hisparse {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;

struct Level {
  std::size_t blocks = 1;    // N_k
  std::size_t sparsity = 1;  // s_k
  bool operator==(const Level&) const = default;
};

class HierPattern {
 public:
  /// Throws a configuration error unless 1 <= s_k <= N_k on every level.
  explicit HierPattern(std::vector<Level> levels);

  /// Single-level pattern: plain s-sparsity in dimension n.
  static HierPattern flat(std::size_t n, std::size_t s);

  std::span<const Level> levels() const { return levels_; }
  std::size_t depth() const { return levels_.size(); }
  std::vector<std::size_t> shape() const;
  std::size_t ambient_size() const;
  std::size_t max_nonzeros() const;

  bool operator==(const HierPattern&) const = default;

 private:
  std::vector<Level> levels_;
};

class HierVector {
 public:
  /// Zero vector of the given shape.
  explicit HierVector(std::vector<std::size_t> shape);
  HierVector(std::vector<std::size_t> shape, CVector data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return static_cast<std::size_t>(data_.size()); }
  const CVector& data() const { return data_; }
  CVector& data() { return data_; }

  cdouble operator[](std::size_t i) const { return data_[static_cast<Eigen::Index>(i)]; }
  cdouble& operator[](std::size_t i) { return data_[static_cast<Eigen::Index>(i)]; }

  std::size_t flat_index(std::span<const std::size_t> multi) const;
  std::vector<std::size_t> multi_index(std::size_t flat) const;

 private:
  std::vector<std::size_t> shape_;
  CVector data_;
};

/// A set of positions, stored as sorted unique flat indices, tagged with the
/// pattern it is meant to conform to. Construction validates the index range
/// only; conformance is queried with conforms().
class HierSupport {
 public:
  HierSupport(HierPattern pattern, std::vector<std::size_t> flat_indices);

  const HierPattern& pattern() const { return pattern_; }
  std::span<const std::size_t> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(std::size_t flat) const;

  /// Multi-index view, one l-tuple per entry.
  std::vector<std::vector<std::size_t>> entries() const;

  /// True when every active parent has at most s_k active children on every
  /// level.
  bool conforms() const;

  bool operator==(const HierSupport& other) const {
    return pattern_ == other.pattern_ && indices_ == other.indices_;
  }

 private:
  HierPattern pattern_;
  std::vector<std::size_t> indices_;
};

/// Support of the best pattern-sparse approximation of x (the thresholding
/// operator). Computed bottom-up: keep the s_l largest entries of every
/// innermost block, then on each coarser level keep the s_k children whose
/// retained energy is largest. Ties resolve to the lower index.
HierSupport hier_threshold(const HierVector& x, const HierPattern& pattern);

/// Same operator on a raw flat vector whose length equals the ambient size.
HierSupport hier_threshold(std::span<const cdouble> x, const HierPattern& pattern);

/// x restricted to the support, zero elsewhere.
HierVector project(const HierVector& x, const HierSupport& support);
CVector project(const CVector& x, const HierSupport& support);

struct BruteForceResult {
  HierSupport support;
  double residual = 0.0;
};

inline constexpr double kMaxEnumeratedSupports = 1e6;

/// Number of maximal conforming supports (exactly s_k children under every
/// active parent). Returned as double since it overflows quickly.
double count_maximal_supports(const HierPattern& pattern);

/// Calls visit(indices) for every maximal conforming support, in
/// lexicographic order. indices are sorted flat indices. Throws a capacity
/// error when more than `limit` supports would be visited.
void for_each_maximal_support(
    const HierPattern& pattern,
    const std::function<void(std::span<const std::size_t>)>& visit,
    double limit = kMaxEnumeratedSupports);

/// Draws a maximal conforming support uniformly at random.
template <class Urbg>
std::vector<std::size_t> sample_maximal_support(const HierPattern& pattern, Urbg& rng);

/// Exhaustive minimiser of ||x - x_S|| over conforming supports. Test oracle.
BruteForceResult brute_force_threshold(const HierVector& x, const HierPattern& pattern);

bool is_hier_sparse(const HierVector& x, const HierPattern& pattern);

/// Support of the exact nonzeros of x under the given pattern.
HierSupport support_of(const HierVector& x, const HierPattern& pattern);

}  // namespace hisparse

#include "hisparse/detail/hsparse_sample.hpp"
