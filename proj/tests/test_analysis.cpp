// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <bit>
#include <cmath>

#include "hisparse/analysis.hpp"
#include "hisparse/error.hpp"
#include "hisparse/rng.hpp"
#include "hisparse/studies.hpp"

namespace hisparse {
namespace {

Eigen::MatrixXcd gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = complex_normal(rng, 1.0);
  }
  return normalize_columns(m);
}

// Singular values of every column subset of size s, enumerated by bitmask.
double svd_rip(const Eigen::MatrixXcd& a, std::size_t s) {
  double delta = 0.0;
  const auto n = static_cast<unsigned>(a.cols());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != s) continue;
    Eigen::MatrixXcd sub(a.rows(), static_cast<Eigen::Index>(s));
    Eigen::Index k = 0;
    for (unsigned j = 0; j < n; ++j) {
      if (mask & (1u << j)) sub.col(k++) = a.col(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sub);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    // Wide submatrices have a zero singular value that JacobiSVD omits.
    const double smin = sub.cols() > sub.rows() ? 0.0 : sv(sv.size() - 1);
    delta = std::max({delta, 1.0 - smin * smin, smax * smax - 1.0});
  }
  return delta;
}

Eigen::MatrixXcd near_duplicate_factor() {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(6, 6);
  a(0, 1) = 0.9;
  a(1, 1) = std::sqrt(0.19);
  return a;
}

TEST(EmpiricalRip, IdentityIsZero) {
  const auto e = empirical_rip(Eigen::MatrixXcd::Identity(6, 6), 3);
  EXPECT_NEAR(e.delta, 0.0, 1e-14);
  EXPECT_EQ(e.supports_examined, 20u);
  EXPECT_NEAR(empirical_rip(Eigen::MatrixXcd::Identity(9, 9), HierPattern({{3, 2}, {3, 2}})).delta, 0.0, 1e-14);
}

TEST(EmpiricalRip, DuplicateColumnsGiveOne) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(4, 4);
  a.col(3) = a.col(2);
  EXPECT_NEAR(empirical_rip(a, 2).delta, 1.0, 1e-12);
}

TEST(EmpiricalRip, MatchesSingularValueOracle) {
  Rng rng(71);
  const Eigen::MatrixXcd a = gaussian(8, 12, rng);
  for (std::size_t s : {1u, 2u, 3u, 4u}) {
    const auto e = empirical_rip(a, s);
    EXPECT_NEAR(e.delta, svd_rip(a, s), 1e-10) << "s=" << s;
    EXPECT_EQ(e.mode, RipMode::exhaustive);
  }
}

TEST(EmpiricalRip, SampledIsLowerBound) {
  Rng rng(72);
  const Eigen::MatrixXcd a = gaussian(8, 12, rng);
  const double exact = empirical_rip(a, 3).delta;
  Rng srng(1);
  const auto sampled = empirical_rip(a, 3, RipMode::sampled, &srng, 50);
  EXPECT_EQ(sampled.mode, RipMode::sampled);
  EXPECT_LE(sampled.delta, exact + 1e-14);
  EXPECT_THROW(empirical_rip(a, 3, RipMode::sampled, nullptr), Error);
  EXPECT_THROW(empirical_rip(a, 13), Error);
}

TEST(EmpiricalRip, CapacityGuard) {
  const Eigen::MatrixXcd big = Eigen::MatrixXcd::Identity(60, 60);
  EXPECT_THROW(empirical_rip(big, 6), Error);  // C(60,6) > 1e6
}

TEST(Kronecker, Structure) {
  Rng rng(73);
  const Eigen::MatrixXcd a = gaussian(2, 3, rng);
  const Eigen::MatrixXcd b = gaussian(3, 2, rng);
  const Eigen::MatrixXcd k = kronecker({a, b});
  ASSERT_EQ(k.rows(), 6);
  ASSERT_EQ(k.cols(), 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 2; ++q) EXPECT_EQ(k(i * 3 + p, j * 2 + q), a(i, j) * b(p, q));
}

TEST(ProductCheck, IdentityFactors) {
  const auto c = hirip_product_check({Eigen::MatrixXcd::Identity(3, 3), Eigen::MatrixXcd::Identity(4, 4)},
                                     HierPattern({{3, 2}, {4, 2}}));
  EXPECT_NEAR(c.bound, 0.0, 1e-14);
  EXPECT_NEAR(c.exact, 0.0, 1e-14);
  EXPECT_TRUE(c.holds);
}

TEST(ProductCheck, IdentityLeavesOtherFactor) {
  Rng rng(74);
  const Eigen::MatrixXcd a = gaussian(4, 6, rng);
  const auto c = hirip_product_check({a, Eigen::MatrixXcd::Identity(2, 2)}, HierPattern({{6, 2}, {2, 2}}));
  EXPECT_NEAR(c.bound, empirical_rip(a, 2).delta, 1e-12);
  EXPECT_TRUE(c.holds);
}

TEST(ProductCheck, SeededGaussianFactorsHold) {
  const HiripStudy s = hirip_study(3, 75, 2, 6, 8, 2);
  EXPECT_EQ(s.holding, 3u);
  EXPECT_LE(s.worst_gap, 1e-9);
}

TEST(RipFloor, IdentityFactors) {
  const auto f = kronecker_rip_floor({Eigen::MatrixXcd::Identity(3, 3), Eigen::MatrixXcd::Identity(2, 2)}, 2);
  EXPECT_NEAR(f.max_factor_delta, 0.0, 1e-14);
  EXPECT_NEAR(f.product_delta, 0.0, 1e-14);
}

TEST(RipFloor, ProductInheritsFactorConstant) {
  const Eigen::MatrixXcd a = near_duplicate_factor();
  EXPECT_NEAR(empirical_rip(a, 4).delta, 0.9, 1e-12);
  const auto f = kronecker_rip_floor({a, Eigen::MatrixXcd::Identity(2, 2)}, 4);
  EXPECT_NEAR(f.max_factor_delta, 0.9, 1e-12);
  EXPECT_GE(f.product_delta, 0.9 - 1e-12);
  EXPECT_TRUE(f.holds);
}

TEST(Theorem1Constants, Values) {
  const auto zero = theorem1_constants(0.0);
  EXPECT_EQ(zero.kappa_printed, 0.0);
  EXPECT_EQ(zero.kappa_standard, 0.0);
  ASSERT_TRUE(zero.tau_printed.has_value());
  EXPECT_NEAR(*zero.tau_printed, 5.15, 1e-15);

  EXPECT_NEAR(theorem1_constants(0.2).kappa_printed, std::sqrt(0.4 / 0.96), 1e-15);
  EXPECT_NEAR(theorem1_constants(0.2).kappa_printed, 0.6455, 1e-4);

  const auto edge = theorem1_constants(1.0 / std::sqrt(3.0));
  EXPECT_NEAR(edge.kappa_printed, std::pow(3.0, 0.25), 1e-12);
  EXPECT_NEAR(edge.kappa_standard, 1.0, 1e-12);
  EXPECT_FALSE(edge.tau_printed.has_value());

  EXPECT_THROW(theorem1_constants(1.0), Error);
  EXPECT_THROW(theorem1_constants(-0.1), Error);
}

TEST(Lemma1, OnGridHasNoError) {
  const auto r = lemma1_decay(KernelKind::angle, 32, {1, 2, 4}, {5.0 / 32.0});
  for (double e : r.curves[0].errors) EXPECT_NEAR(e, 0.0, 1e-12);
}

TEST(Lemma1, HalfIntegerOffsetDecaysLikeInverseRoot) {
  const auto r = lemma1_decay(KernelKind::delay, 256, {1, 2, 4, 8, 16, 32}, {50.5 / 256.0});
  EXPECT_TRUE(r.monotone);
  EXPECT_GT(r.worst_slope, -0.65);
  EXPECT_LT(r.worst_slope, -0.35);
  EXPECT_THROW(lemma1_decay(KernelKind::angle, 8, {4}, {0.1}), Error);
}

TEST(Lemma1, BestSparseErrorAndSlope) {
  CVector u(4);
  u << 3.0, cdouble(0.0, 4.0), 1.0, cdouble(0.0, -2.0);
  EXPECT_NEAR(best_sparse_error(u, 2), std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {1.0, std::pow(2.0, -0.5), 0.5, std::pow(8.0, -0.5)}), -0.5, 1e-12);
  EXPECT_TRUE(std::isnan(loglog_slope({1, 2}, {1.0, 0.0})));
}

TEST(Prop1, SmallSweepIsDeterministic) {
  Rng a(76), b(76);
  const auto r1 = prop1_constant_fit(64, 64, 2, 1, {1, 2, 4}, {1, 2, 4}, 5, a);
  const auto r2 = prop1_constant_fit(64, 64, 2, 1, {1, 2, 4}, {1, 2, 4}, 5, b);
  ASSERT_EQ(r1.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r1.rows[i].max_ratio, r2.rows[i].max_ratio);
    EXPECT_GT(r1.rows[i].max_ratio, 0.0);
    EXPECT_LE(r1.rows[i].mean_ratio, r1.rows[i].max_ratio);
  }
  EXPECT_THROW(prop1_constant_fit(64, 64, 2, 1, {1, 2}, {1}, 5, a), Error);
}

TEST(Studies, RunByName) {
  const auto t = run_study("theorem1", nlohmann::json{{"delta", 0.2}});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_THROW(run_study("nope", nlohmann::json::object()), Error);
  EXPECT_THROW(run_study("lemma1", nlohmann::json{{"bogus", 1}}), Error);
  const auto l = run_study("lemma1", nlohmann::json{{"dimension", 64}, {"k_max", 8}, {"kind", "angle"}});
  EXPECT_TRUE(l.contains("angle"));
  EXPECT_FALSE(l.contains("delay"));
}

}  // namespace
}  // namespace hisparse
