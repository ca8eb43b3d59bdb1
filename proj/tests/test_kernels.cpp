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
#include <limits>
#include <random>
#include <vector>

#include "bellaudit/kernels/kernels.hpp"

using namespace bellaudit;
namespace k = bellaudit::kernels;

namespace {

bool have_avx2() { return k::isa_supported(k::Isa::Avx2); }

// Lengths straddling every vector-width remainder.
const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 31, 32, 33, 63, 100, 1023, 4097};

}  // namespace

TEST(Kernels, ScalarCountKeysAgainstLoop) {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> byte(0, 7);
  for (auto n : kLengths) {
    std::vector<std::uint8_t> keys(n);
    for (auto& v : keys) v = static_cast<std::uint8_t>(byte(rng));
    k::KeyCounts want{};
    for (auto v : keys) {
      if (v < 4) ++want[v];
    }
    EXPECT_EQ(k::scalar::count_keys(keys), want) << n;
  }
}

TEST(Kernels, ScalarBinsAgainstFloor) {
  std::vector<double> v{-0.5, 0.0, 3.999, 4.0, 39.99, 40.0, 1e300, std::numeric_limits<double>::quiet_NaN()};
  std::vector<std::uint64_t> counts(10, 0);
  k::BinOverflow of;
  k::scalar::accumulate_bins(v, 0.0, 4.0, counts, of);
  EXPECT_EQ(counts[0], 2u);
  EXPECT_EQ(counts[1], 1u);
  EXPECT_EQ(counts[9], 1u);
  EXPECT_EQ(of.below, 2u);  // -0.5 and NaN
  EXPECT_EQ(of.above, 2u);
}

TEST(Kernels, ScalarSumExp) {
  std::vector<double> x{0.0, -1.0, -2.0, -800.0};
  EXPECT_NEAR(k::scalar::sum_exp(x, 0.0), 1.0 + std::exp(-1.0) + std::exp(-2.0), 1e-15);
}

TEST(Kernels, ScalarShapeTerms) {
  std::vector<double> x{10, 20, 0, 5}, y{12, 18, 0, 0};
  const double s = 1.1;
  double chi2 = 0, g = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double den = x[i] + s * s * y[i];
    if (den == 0) continue;
    chi2 += (x[i] - s * y[i]) * (x[i] - s * y[i]) / den;
    g += x[i] * y[i] * (x[i] - s * y[i]) / (den * den);
  }
  const auto t = k::scalar::shape_terms(x, y, s);
  EXPECT_NEAR(t.chi2, chi2, 1e-12);
  EXPECT_NEAR(t.g, g, 1e-15);
}

TEST(Kernels, Avx2CountKeysMatchesScalar) {
  if (!have_avx2()) GTEST_SKIP() << "no AVX2";
#if BELLAUDIT_HAVE_AVX2_KERNELS
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto n : kLengths) {
    std::vector<std::uint8_t> keys(n);
    for (auto& v : keys) v = static_cast<std::uint8_t>(byte(rng) % 6);
    EXPECT_EQ(k::avx2::count_keys(keys), k::scalar::count_keys(keys)) << n;
    for (auto& v : keys) v = static_cast<std::uint8_t>(byte(rng));
    EXPECT_EQ(k::avx2::count_keys(keys), k::scalar::count_keys(keys)) << n;
  }
  // Long runs exercise the per-lane counter flush.
  std::vector<std::uint8_t> ones(1'000'003, 1);
  EXPECT_EQ(k::avx2::count_keys(ones)[1], ones.size());
#endif
}

TEST(Kernels, Avx2BinsMatchScalar) {
  if (!have_avx2()) GTEST_SKIP() << "no AVX2";
#if BELLAUDIT_HAVE_AVX2_KERNELS
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 1100.0);
  for (auto n : kLengths) {
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    if (n > 2) {
      v[1] = std::numeric_limits<double>::quiet_NaN();
      v[2] = 1000.0;  // exactly the upper edge
    }
    std::vector<std::uint64_t> c1(250, 0), c2(250, 0);
    k::BinOverflow o1, o2;
    k::scalar::accumulate_bins(v, 0.0, 4.0, c1, o1);
    k::avx2::accumulate_bins(v, 0.0, 4.0, c2, o2);
    EXPECT_EQ(c1, c2) << n;
    EXPECT_EQ(o1.below, o2.below) << n;
    EXPECT_EQ(o1.above, o2.above) << n;
  }
#endif
}

TEST(Kernels, Avx2SumExpMatchesScalar) {
  if (!have_avx2()) GTEST_SKIP() << "no AVX2";
#if BELLAUDIT_HAVE_AVX2_KERNELS
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-740.0, 0.0);
  for (auto n : kLengths) {
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    if (n > 1) x[0] = 0.0;
    const double a = k::scalar::sum_exp(x, 0.0), b = k::avx2::sum_exp(x, 0.0);
    EXPECT_NEAR(b, a, 1e-13 * std::max(1.0, a)) << n;
  }
  std::vector<double> x(64);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = -0.25 * static_cast<double>(i);
  EXPECT_NEAR(k::avx2::sum_exp(x, -3.0), k::scalar::sum_exp(x, -3.0), 1e-12);
#endif
}

TEST(Kernels, Avx2ShapeTermsMatchScalar) {
  if (!have_avx2()) GTEST_SKIP() << "no AVX2";
#if BELLAUDIT_HAVE_AVX2_KERNELS
  std::mt19937_64 rng(5);
  std::poisson_distribution<int> p(300);
  for (auto n : kLengths) {
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = p(rng);
      y[i] = i % 7 == 3 ? 0.0 : p(rng);
      if (i % 11 == 5) x[i] = y[i] = 0.0;
    }
    for (double s : {0.5, 1.0, 1.37}) {
      const auto a = k::scalar::shape_terms(x, y, s), b = k::avx2::shape_terms(x, y, s);
      EXPECT_NEAR(b.chi2, a.chi2, 1e-10 * std::max(1.0, a.chi2)) << n;
      EXPECT_NEAR(b.g, a.g, 1e-12 * std::max(1.0, std::abs(a.g))) << n;
    }
  }
#endif
}

TEST(Kernels, DispatchCanBePinned) {
  const auto before = k::active_isa();
  k::set_active_isa(k::Isa::Scalar);
  EXPECT_EQ(k::active_isa(), k::Isa::Scalar);
  std::vector<std::uint8_t> keys{0, 1, 1, 3, 9};
  EXPECT_EQ(k::count_keys(keys), (k::KeyCounts{1, 2, 0, 1}));
  if (have_avx2()) {
    k::set_active_isa(k::Isa::Avx2);
    EXPECT_EQ(k::count_keys(keys), (k::KeyCounts{1, 2, 0, 1}));
  }
  k::set_active_isa(before);
}
