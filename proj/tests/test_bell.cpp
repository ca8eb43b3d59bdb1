// Copyright 2026 The bellaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bellaudit/bell.hpp"
#include "bellaudit/errors.hpp"

using namespace bellaudit;

namespace {

TrialRecord spins(std::int64_t id, int a, int b, Outcome oa, Outcome ob) {
  TrialRecord r;
  r.trial_id = id;
  r.choice_a = Choice(a);
  r.choice_b = Choice(b);
  r.outcome_a = oa;
  r.outcome_b = ob;
  return r;
}

CorrelationEstimate est(double E, std::optional<double> sigma) {
  CorrelationEstimate e;
  e.E = E;
  e.sigma = sigma;
  return e;
}

}  // namespace

TEST(Bell, PerfectCorrelation) {
  Dataset d;
  std::int64_t id = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 10; ++k) d.records.push_back(spins(id++, a, b, Outcome::Plus, Outcome::Plus));
  const auto e = estimate_correlation(d, 1, 0);
  EXPECT_DOUBLE_EQ(e.E, 1.0);
  EXPECT_DOUBLE_EQ(*e.sigma, 0.0);
  EXPECT_EQ(e.n, 10u);
  const auto s = chsh(d, parse_signs("+++-"));
  EXPECT_DOUBLE_EQ(s.S, 2.0);
}

TEST(Bell, CountsOnlySpinPairs) {
  Dataset d;
  d.records = {spins(1, 0, 0, Outcome::Plus, Outcome::Minus), spins(2, 0, 0, Outcome::Plus, Outcome::Plus),
               spins(3, 0, 0, Outcome::Minus, Outcome::Minus), spins(4, 0, 0, Outcome::Click, Outcome::Plus),
               spins(5, 0, 0, Outcome::Plus, Outcome::NoClick)};
  const auto e = estimate_correlation(d, 0, 0);
  EXPECT_EQ(e.n, 3u);
  EXPECT_NEAR(e.E, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(*e.sigma, std::sqrt((1.0 - 1.0 / 9.0) / 3.0), 1e-15);
  EXPECT_THROW(estimate_correlation(d, 1, 1), DataError);
}

TEST(Bell, ChshIsLinearInTerms) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int rep = 0; rep < 200; ++rep) {
    std::array<CorrelationEstimate, 4> t;
    for (auto& e : t) e = est(u(rng), 0.01 + 0.1 * std::abs(u(rng)));
    ChshSigns s;
    for (auto& v : s) v = u(rng) < 0 ? -1 : 1;
    const auto r = chsh_from_terms(t, s);
    double S = 0, var = 0;
    for (int i = 0; i < 4; ++i) {
      S += s[i] * t[i].E;
      var += *t[i].sigma * *t[i].sigma;
    }
    EXPECT_NEAR(r.S, S, 1e-14);
    EXPECT_NEAR(r.sigma_S, std::sqrt(var), 1e-14);
    ChshSigns flipped = s;
    for (auto& v : flipped) v = -v;
    EXPECT_NEAR(chsh_from_terms(t, flipped).S, -S, 1e-14);
  }
}

TEST(Bell, IdealSingletAnglesReachTsirelson) {
  // E(a, b) = -cos(a - b) at the textbook angles.
  const double pi = std::numbers::pi;
  const double a[2] = {0, pi / 2}, b[2] = {pi / 4, -pi / 4};
  std::array<CorrelationEstimate, 4> t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t[2 * i + j] = est(-std::cos(a[i] - b[j]), 0.0);
  EXPECT_NEAR(std::abs(chsh_from_terms(t, parse_signs("+++-")).S), kQuantumBound, 1e-12);
}

TEST(Bell, SignParsing) {
  EXPECT_EQ(parse_signs("+-+-"), (ChshSigns{1, -1, 1, -1}));
  EXPECT_EQ(format_signs({1, 1, 1, -1}), "+++-");
  EXPECT_THROW(parse_signs("++"), ArgumentError);
  EXPECT_THROW(parse_signs("++x-"), ArgumentError);
}

TEST(Bell, MunichVisibilityDifference) {
  std::vector<CorrelationEstimate> e{est(-0.603, 0.022), est(0.463, 0.025)};
  const auto r = visibility_consistency(e, "Munich");
  EXPECT_NEAR(r.inputs.at("max_abs_difference"), 0.140, 1e-12);
  const double z = 0.140 / std::hypot(0.022, 0.025);
  EXPECT_NEAR(r.statistic, z, 1e-12);
  EXPECT_GE(r.statistic, 4.0);
  EXPECT_EQ(r.category, TestCategory::Model);
  EXPECT_LT(r.p.corrected, 1e-4);
}

TEST(Bell, VisibilityIgnoresSign) {
  std::vector<CorrelationEstimate> e{est(0.5, 0.02), est(-0.45, 0.03), est(0.47, 0.01)};
  auto neg = e;
  for (auto& x : neg) x.E = -x.E;
  const auto r1 = visibility_consistency(e);
  const auto r2 = visibility_consistency(neg);
  EXPECT_DOUBLE_EQ(r1.statistic, r2.statistic);
  EXPECT_DOUBLE_EQ(r1.p.corrected, r2.p.corrected);
  EXPECT_DOUBLE_EQ(r1.p.correction_factor, 3.0);
}

TEST(Bell, VisibilityRejectsBadInput) {
  std::vector<CorrelationEstimate> one{est(0.5, 0.1)};
  EXPECT_THROW(visibility_consistency(one), ArgumentError);
  std::vector<CorrelationEstimate> nosigma{est(0.5, 0.1), est(0.4, std::nullopt)};
  EXPECT_THROW(visibility_consistency(nosigma), ArgumentError);
}
