// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include "hisparse/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hisparse/error.hpp"
#include "hisparse/rng.hpp"

namespace hisparse {

using nlohmann::json;

namespace {

void check_keys(const json& p, std::initializer_list<std::string_view> known) {
  if (!p.is_object()) raise(ErrorKind::configuration, "study parameters must be a JSON object");
  for (const auto& item : p.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      raise(ErrorKind::configuration, "unknown study parameter '" + item.key() + "'");
    }
  }
}

template <class T>
T get_or(const json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const json::exception&) {
    raise(ErrorKind::configuration, std::string("study parameter '") + key + "' has the wrong type");
  }
}

json lemma1(const json& p) {
  check_keys(p, {"kind", "dimension", "k_max", "k_values", "parameters"});
  const auto dim = get_or<std::size_t>(p, "dimension", 512);
  std::vector<std::size_t> ks = get_or<std::vector<std::size_t>>(p, "k_values", {});
  if (ks.empty()) {
    const auto k_max = get_or<std::size_t>(p, "k_max", 64);
    for (std::size_t k = 1; k <= k_max; ++k) ks.push_back(k);
  }
  // Midway between grid points leaks the most energy.
  const double base = std::floor(static_cast<double>(dim) / 5.0);
  std::vector<double> params = get_or<std::vector<double>>(
      p, "parameters",
      {(base + 0.5) / static_cast<double>(dim), (base + 0.25) / static_cast<double>(dim)});
  const auto kind = get_or<std::string>(p, "kind", "both");
  if (kind != "angle" && kind != "delay" && kind != "both") {
    raise(ErrorKind::configuration, "study parameter 'kind' must be angle, delay or both");
  }
  json out = json::object();
  if (kind != "delay") out["angle"] = to_json(lemma1_decay(KernelKind::angle, dim, ks, params));
  if (kind != "angle") out["delay"] = to_json(lemma1_decay(KernelKind::delay, dim, ks, params));
  return out;
}

json prop1(const json& p) {
  check_keys(p, {"M", "N", "L", "K", "k_values", "trials", "seed"});
  const auto ks = get_or<std::vector<std::size_t>>(p, "k_values", {1, 2, 4, 8, 16});
  Rng rng(get_or<std::uint64_t>(p, "seed", 2018));
  return to_json(prop1_constant_fit(get_or<std::size_t>(p, "M", 256),
                                    get_or<std::size_t>(p, "N", 256),
                                    get_or<std::size_t>(p, "L", 3), get_or<std::size_t>(p, "K", 1),
                                    ks, ks, get_or<std::size_t>(p, "trials", 50), rng));
}

json hirip(const json& p) {
  check_keys(p, {"instances", "seed", "factors", "rows", "cols", "sparsity"});
  const HiripStudy s = hirip_study(
      get_or<std::size_t>(p, "instances", 100), get_or<std::uint64_t>(p, "seed", 2018),
      get_or<std::size_t>(p, "factors", 2), get_or<std::size_t>(p, "rows", 6),
      get_or<std::size_t>(p, "cols", 8), get_or<std::size_t>(p, "sparsity", 2));
  json checks = json::array();
  for (const auto& c : s.checks) checks.push_back(to_json(c));
  return json{{"instances", s.instances},
              {"holding", s.holding},
              {"worst_gap", s.worst_gap},
              {"checks", checks}};
}

json theorem1(const json& p) {
  check_keys(p, {"delta"});
  std::vector<double> deltas{0.1, 0.2, 0.3, 0.4, 0.5, 1.0 / std::sqrt(3.0)};
  if (p.contains("delta")) {
    deltas = p["delta"].is_array() ? get_or<std::vector<double>>(p, "delta", {})
                                   : std::vector<double>{get_or<double>(p, "delta", 0.0)};
  }
  json rows = json::array();
  for (double d : deltas) rows.push_back(to_json(theorem1_constants(d)));
  return rows;
}

}  // namespace

HiripStudy hirip_study(std::size_t instances, std::uint64_t seed, std::size_t factors,
                       std::size_t rows, std::size_t cols, std::size_t sparsity) {
  if (factors == 0 || rows == 0 || cols == 0 || sparsity == 0 || sparsity > cols) {
    raise(ErrorKind::configuration, "hirip study needs 1 <= sparsity <= cols and positive sizes");
  }
  HiripStudy out;
  out.instances = instances;
  out.worst_gap = -std::numeric_limits<double>::infinity();
  std::vector<Level> levels(factors, Level{cols, sparsity});
  const HierPattern pattern(levels);
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(derive_seed(seed, {i}));
    std::vector<Eigen::MatrixXcd> fs;
    for (std::size_t k = 0; k < factors; ++k) {
      Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = complex_normal(rng, 1.0);
      }
      fs.push_back(normalize_columns(std::move(m)));
    }
    ProductCheck c = hirip_product_check(fs, pattern);
    if (c.holds) ++out.holding;
    out.worst_gap = std::max(out.worst_gap, c.exact - c.bound);
    out.checks.push_back(std::move(c));
  }
  return out;
}

json run_study(std::string_view study, const json& params) {
  const json& p = params.is_null() ? json::object() : params;
  if (study == "lemma1") return lemma1(p);
  if (study == "prop1") return prop1(p);
  if (study == "hirip") return hirip(p);
  if (study == "theorem1") return theorem1(p);
  raise(ErrorKind::configuration, "unknown study '" + std::string(study) +
                                      "' (expected lemma1, prop1, hirip or theorem1)");
}

}  // namespace hisparse
