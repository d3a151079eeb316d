// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include "hisparse/hsparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hisparse/error.hpp"

namespace hisparse {

namespace {

std::string shape_string(std::span<const std::size_t> shape) {
  std::string out = "(";
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(shape[k]);
  }
  return out + ")";
}

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

// Indices of the `keep` largest values in values[0..n), ascending order.
// Strict total order (value desc, index asc) makes the chosen set unique.
void select_largest(const double* values, std::size_t n, std::size_t keep,
                    std::vector<std::size_t>& order, std::vector<std::size_t>& out) {
  order.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto better = [values](std::size_t a, std::size_t b) {
    return values[a] > values[b] || (values[a] == values[b] && a < b);
  };
  if (keep < n) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                     order.end(), better);
  }
  out.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(out.begin(), out.end());
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

}  // namespace

// ---------------------------------------------------------------------------
// HierPattern

HierPattern::HierPattern(std::vector<Level> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) raise(ErrorKind::configuration, "hierarchical pattern needs at least one level");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const Level& lv = levels_[k];
    if (lv.blocks == 0 || lv.sparsity == 0 || lv.sparsity > lv.blocks) {
      raise(ErrorKind::configuration,
            "invalid pattern level " + std::to_string(k) + ": (" + std::to_string(lv.blocks) +
                "," + std::to_string(lv.sparsity) + ") needs 1 <= s <= N");
    }
  }
}

HierPattern HierPattern::flat(std::size_t n, std::size_t s) { return HierPattern({{n, s}}); }

std::vector<std::size_t> HierPattern::shape() const {
  std::vector<std::size_t> out;
  out.reserve(levels_.size());
  for (const Level& lv : levels_) out.push_back(lv.blocks);
  return out;
}

std::size_t HierPattern::ambient_size() const {
  std::size_t n = 1;
  for (const Level& lv : levels_) n *= lv.blocks;
  return n;
}

std::size_t HierPattern::max_nonzeros() const {
  std::size_t n = 1;
  for (const Level& lv : levels_) n *= lv.sparsity;
  return n;
}

// ---------------------------------------------------------------------------
// HierVector

HierVector::HierVector(std::vector<std::size_t> shape)
    : shape_(std::move(shape)),
      data_(CVector::Zero(static_cast<Eigen::Index>(product(shape_)))) {}

HierVector::HierVector(std::vector<std::size_t> shape, CVector data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (static_cast<std::size_t>(data_.size()) != product(shape_)) {
    raise(ErrorKind::dimension, "vector length " + std::to_string(data_.size()) +
                                    " does not match shape " + shape_string(shape_));
  }
}

std::size_t HierVector::flat_index(std::span<const std::size_t> multi) const {
  if (multi.size() != shape_.size()) raise(ErrorKind::dimension, "multi-index depth mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    if (multi[k] >= shape_[k]) raise(ErrorKind::dimension, "multi-index out of range");
    flat = flat * shape_[k] + multi[k];
  }
  return flat;
}

std::vector<std::size_t> HierVector::multi_index(std::size_t flat) const {
  if (flat >= size()) raise(ErrorKind::dimension, "flat index out of range");
  std::vector<std::size_t> multi(shape_.size());
  for (std::size_t k = shape_.size(); k-- > 0;) {
    multi[k] = flat % shape_[k];
    flat /= shape_[k];
  }
  return multi;
}

// ---------------------------------------------------------------------------
// HierSupport

HierSupport::HierSupport(HierPattern pattern, std::vector<std::size_t> flat_indices)
    : pattern_(std::move(pattern)), indices_(std::move(flat_indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (!indices_.empty() && indices_.back() >= pattern_.ambient_size()) {
    raise(ErrorKind::dimension, "support index " + std::to_string(indices_.back()) +
                                    " outside ambient size " +
                                    std::to_string(pattern_.ambient_size()));
  }
}

bool HierSupport::contains(std::size_t flat) const {
  return std::binary_search(indices_.begin(), indices_.end(), flat);
}

std::vector<std::vector<std::size_t>> HierSupport::entries() const {
  const auto shape = pattern_.shape();
  std::vector<std::vector<std::size_t>> out;
  out.reserve(indices_.size());
  for (std::size_t flat : indices_) {
    std::vector<std::size_t> multi(shape.size());
    for (std::size_t k = shape.size(); k-- > 0;) {
      multi[k] = flat % shape[k];
      flat /= shape[k];
    }
    out.push_back(std::move(multi));
  }
  return out;
}

bool HierSupport::conforms() const {
  const auto levels = pattern_.levels();
  // inner[k] = N_{k+1} * ... * N_l, so flat / inner[k] is the prefix (i_1..i_k).
  std::vector<std::size_t> inner(levels.size() + 1, 1);
  for (std::size_t k = levels.size(); k-- > 0;) inner[k] = inner[k + 1] * levels[k].blocks;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    // Sorted flat indices give sorted prefixes at every depth.
    std::size_t parent = SIZE_MAX, child = SIZE_MAX, count = 0;
    for (std::size_t flat : indices_) {
      const std::size_t prefix = flat / inner[k + 1];
      const std::size_t p = prefix / levels[k].blocks;
      if (p != parent) {
        parent = p;
        child = prefix;
        count = 1;
      } else if (prefix != child) {
        child = prefix;
        if (++count > levels[k].sparsity) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Thresholding

HierSupport hier_threshold(std::span<const cdouble> x, const HierPattern& pattern) {
  if (x.size() != pattern.ambient_size()) {
    raise(ErrorKind::dimension, "vector length " + std::to_string(x.size()) +
                                    " does not match pattern size " +
                                    std::to_string(pattern.ambient_size()));
  }
  const auto levels = pattern.levels();
  const std::size_t depth = levels.size();

  std::vector<double> energy(x.size());
  std::transform(x.begin(), x.end(), energy.begin(), [](cdouble z) { return std::norm(z); });

  // Bottom-up: chosen[k] holds, for each group at level k, its s_k selected
  // children (local indices), groups laid out contiguously.
  std::vector<std::vector<std::size_t>> chosen(depth);
  std::vector<std::size_t> order, picked;
  for (std::size_t k = depth; k-- > 0;) {
    const std::size_t n = levels[k].blocks, s = levels[k].sparsity;
    const std::size_t groups = energy.size() / n;
    std::vector<double> group_energy(groups);
    chosen[k].reserve(groups * s);
    for (std::size_t g = 0; g < groups; ++g) {
      const double* vals = energy.data() + g * n;
      select_largest(vals, n, s, order, picked);
      double sum = 0.0;
      for (std::size_t c : picked) {
        sum += vals[c];
        chosen[k].push_back(c);
      }
      group_energy[g] = sum;
    }
    energy = std::move(group_energy);
  }

  // Top-down expansion of the selected prefixes.
  std::vector<std::size_t> prefixes{0};
  for (std::size_t k = 0; k < depth; ++k) {
    const std::size_t n = levels[k].blocks, s = levels[k].sparsity;
    std::vector<std::size_t> next;
    next.reserve(prefixes.size() * s);
    for (std::size_t g : prefixes) {
      for (std::size_t j = 0; j < s; ++j) next.push_back(g * n + chosen[k][g * s + j]);
    }
    prefixes = std::move(next);
  }
  return HierSupport(pattern, std::move(prefixes));
}

HierSupport hier_threshold(const HierVector& x, const HierPattern& pattern) {
  if (x.shape() != pattern.shape()) {
    raise(ErrorKind::dimension, "vector shape " + shape_string(x.shape()) +
                                    " does not match pattern shape " +
                                    shape_string(pattern.shape()));
  }
  return hier_threshold(std::span<const cdouble>(x.data().data(), x.size()), pattern);
}

CVector project(const CVector& x, const HierSupport& support) {
  if (!support.empty() && support.indices().back() >= static_cast<std::size_t>(x.size())) {
    raise(ErrorKind::dimension, "support index out of range for vector of length " +
                                    std::to_string(x.size()));
  }
  CVector out = CVector::Zero(x.size());
  for (std::size_t i : support.indices()) out[static_cast<Eigen::Index>(i)] = x[static_cast<Eigen::Index>(i)];
  return out;
}

HierVector project(const HierVector& x, const HierSupport& support) {
  return HierVector(x.shape(), project(x.data(), support));
}

// ---------------------------------------------------------------------------
// Enumeration

double count_maximal_supports(const HierPattern& pattern) {
  double count = 1.0;
  const auto levels = pattern.levels();
  for (std::size_t k = levels.size(); k-- > 0;) {
    count = binomial(levels[k].blocks, levels[k].sparsity) *
            std::pow(count, static_cast<double>(levels[k].sparsity));
  }
  return count;
}

namespace {

class SupportEnumerator {
 public:
  SupportEnumerator(const HierPattern& pattern,
                    const std::function<void(std::span<const std::size_t>)>& visit)
      : levels_(pattern.levels()), visit_(visit) {}

  void run() { block(0, 0, [this] { emit(); }); }

 private:
  // Enumerates all maximal choices inside the block with the given prefix at
  // level k, then calls `done` once per choice.
  void block(std::size_t k, std::size_t prefix, const std::function<void()>& done) {
    if (k == levels_.size()) {
      current_.push_back(prefix);
      done();
      current_.pop_back();
      return;
    }
    const std::size_t n = levels_[k].blocks, s = levels_[k].sparsity;
    std::vector<std::size_t> combo(s);
    std::iota(combo.begin(), combo.end(), std::size_t{0});
    while (true) {
      children(k, prefix, combo, 0, done);
      // Next combination in lexicographic order.
      std::size_t i = s;
      while (i > 0 && combo[i - 1] == n - s + i - 1) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < s; ++j) combo[j] = combo[j - 1] + 1;
    }
  }

  // Cartesian product over the chosen children of one block.
  void children(std::size_t k, std::size_t prefix, const std::vector<std::size_t>& combo,
                std::size_t j, const std::function<void()>& done) {
    if (j == combo.size()) {
      done();
      return;
    }
    const std::size_t child = prefix * levels_[k].blocks + combo[j];
    block(k + 1, child, [&, this] { children(k, prefix, combo, j + 1, done); });
  }

  void emit() { visit_(current_); }

  std::span<const Level> levels_;
  const std::function<void(std::span<const std::size_t>)>& visit_;
  std::vector<std::size_t> current_;
};

}  // namespace

void for_each_maximal_support(const HierPattern& pattern,
                              const std::function<void(std::span<const std::size_t>)>& visit,
                              double limit) {
  const double count = count_maximal_supports(pattern);
  if (count > limit) {
    raise(ErrorKind::capacity, "pattern admits " + std::to_string(count) +
                                   " supports, enumeration limit is " + std::to_string(limit));
  }
  SupportEnumerator(pattern, visit).run();
}

BruteForceResult brute_force_threshold(const HierVector& x, const HierPattern& pattern) {
  if (x.shape() != pattern.shape()) {
    raise(ErrorKind::dimension, "vector shape " + shape_string(x.shape()) +
                                    " does not match pattern shape " +
                                    shape_string(pattern.shape()));
  }
  double best = -1.0;
  std::vector<std::size_t> best_support;
  for_each_maximal_support(pattern, [&](std::span<const std::size_t> support) {
    double residual = 0.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (next < support.size() && support[next] == i) {
        ++next;
        continue;
      }
      residual += std::norm(x[i]);
    }
    if (best < 0.0 || residual < best) {
      best = residual;
      best_support.assign(support.begin(), support.end());
    }
  });
  return {HierSupport(pattern, std::move(best_support)), std::sqrt(best)};
}

HierSupport support_of(const HierVector& x, const HierPattern& pattern) {
  if (x.size() != pattern.ambient_size()) {
    raise(ErrorKind::dimension, "vector length does not match pattern size");
  }
  std::vector<std::size_t> nz;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != cdouble{}) nz.push_back(i);
  }
  return HierSupport(pattern, std::move(nz));
}

bool is_hier_sparse(const HierVector& x, const HierPattern& pattern) {
  if (x.shape() != pattern.shape()) {
    raise(ErrorKind::dimension, "vector shape " + shape_string(x.shape()) +
                                    " does not match pattern shape " +
                                    shape_string(pattern.shape()));
  }
  return support_of(x, pattern).conforms();
}

}  // namespace hisparse
