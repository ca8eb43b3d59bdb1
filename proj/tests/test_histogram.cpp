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

#include <random>

#include "bellaudit/errors.hpp"
#include "bellaudit/histogram.hpp"

using namespace bellaudit;

namespace {

Histogram make(std::vector<std::uint64_t> counts, double width = 4.0) {
  Histogram h;
  h.bins = UniformBins{0.0, width, static_cast<int>(counts.size())};
  h.counts = std::move(counts);
  return h;
}

TrialRecord click(std::int64_t id, int a, int b, Party p, double t) {
  TrialRecord r;
  r.trial_id = id;
  r.choice_a = Choice(a);
  r.choice_b = Choice(b);
  (p == Party::A ? r.outcome_a : r.outcome_b) = Outcome::Click;
  DetectionTag tag;
  tag.party = p;
  tag.time_offset_ns = t;
  r.tags.push_back(tag);
  return r;
}

}  // namespace

TEST(Histogram, EmptyDatasetGivesZeroHistograms) {
  const auto set = bin_time_tags(Dataset{}, Party::A, 4.0, 250);
  ASSERT_EQ(set.by_choice.size(), 4u);
  for (const auto& [ab, h] : set.by_choice) {
    EXPECT_EQ(h.counts.size(), 250u);
    EXPECT_EQ(h.total(), 0u);
  }
}

TEST(Histogram, BinsSplitByChoiceWithOverflow) {
  Dataset d;
  d.records = {click(1, 0, 0, Party::B, 3.9), click(2, 0, 0, Party::B, 4.0), click(3, 0, 1, Party::B, 999.0),
               click(4, 0, 1, Party::B, 1000.0), click(5, 1, 1, Party::B, -1.0), click(6, 1, 1, Party::A, 10.0)};
  auto nochoice = click(7, 0, 0, Party::B, 5.0);
  nochoice.choice_a.reset();
  d.records.push_back(nochoice);
  const auto set = bin_time_tags(d, Party::B, 4.0, 250);
  EXPECT_EQ(set.by_choice.at({0, 0}).counts[0], 1u);
  EXPECT_EQ(set.by_choice.at({0, 0}).counts[1], 1u);
  EXPECT_EQ(set.by_choice.at({0, 1}).counts[249], 1u);
  EXPECT_EQ(set.below_range, 1u);
  EXPECT_EQ(set.above_range, 1u);
  EXPECT_EQ(set.unattributed, 1u);
  EXPECT_EQ(set.by_choice.at({1, 1}).total(), 0u);
}

TEST(Histogram, PoissonSigma) {
  const auto h = make({90000, 0, 4});
  EXPECT_DOUBLE_EQ(h.sigma(0), 300.0);
  EXPECT_DOUBLE_EQ(h.sigma(1), 0.0);
  EXPECT_DOUBLE_EQ(h.sigma(2), 2.0);
}

TEST(Histogram, BinSpec) {
  const auto b = parse_bin_spec("250x4ns");
  EXPECT_EQ(b.count, 250);
  EXPECT_DOUBLE_EQ(b.width, 4.0);
  EXPECT_EQ(parse_bin_spec("10x2.5", 100.0).origin, 100.0);
  EXPECT_THROW(parse_bin_spec("250"), ArgumentError);
  EXPECT_THROW(parse_bin_spec("0x4ns"), ArgumentError);
  EXPECT_THROW(parse_bin_spec("10x-1ns"), ArgumentError);
}

TEST(Histogram, GridFoldsLastPulseAndNotesEmpty) {
  Dataset d;
  TrialRecord r;
  r.trial_id = 1;
  r.choice_a = Choice(0);
  r.choice_b = Choice(1);
  r.outcome_a = Outcome::Click;
  DetectionTag t;
  t.party = Party::A;
  t.pulse = 800;
  t.phase = 159;
  r.tags.push_back(t);
  d.records.push_back(r);
  const auto g = bin_grid(d, Party::A);
  EXPECT_EQ(g.by_choice.at({0, 1}).counts[15][7], 1u);
  EXPECT_EQ(g.tags_used, 1u);
  EXPECT_TRUE(g.notes.empty());
  const auto empty = bin_grid(Dataset{}, Party::A);
  EXPECT_EQ(empty.tags_used, 0u);
  EXPECT_EQ(empty.by_choice.at({0, 0}).total(), 0u);
  EXPECT_EQ(empty.notes.size(), 1u);
}

TEST(Histogram, UniformDarkCountsFillGridEvenly) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pulse(0, kMaxPulse - 1), phase(0, kPhaseDomain - 1);
  int good = 0, cells = 0;
  for (int run = 0; run < 100; ++run) {
    Dataset d;
    for (int i = 0; i < 12800; ++i) {
      TrialRecord r;
      r.trial_id = i;
      r.choice_a = Choice(0);
      r.choice_b = Choice(0);
      r.outcome_a = Outcome::Click;
      DetectionTag t;
      t.party = Party::A;
      t.pulse = pulse(rng);
      t.phase = phase(rng);
      r.tags.push_back(t);
      d.records.push_back(r);
    }
    const auto& g = bin_grid(d, Party::A).by_choice.at({0, 0});
    for (const auto& row : g.counts) {
      for (auto c : row) {
        ++cells;
        good += std::abs(static_cast<double>(c) - 100.0) <= 5 * 10.0;
      }
    }
  }
  EXPECT_GE(good, 0.99 * cells);
}

TEST(Histogram, ShapeIdentityAndScaling) {
  const auto h = make({30, 50, 80, 120, 90, 40, 10, 5});
  auto r = shape_consistency(h, h);
  EXPECT_NEAR(r.scale, 1.0, 1e-12);
  EXPECT_NEAR(r.chi2, 0.0, 1e-12);
  EXPECT_NEAR(r.raw_p, 1.0, 1e-12);
  std::vector<std::uint64_t> tripled;
  for (auto c : h.counts) tripled.push_back(3 * c);
  r = shape_consistency(h, make(tripled));
  EXPECT_NEAR(r.scale, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.chi2, 0.0, 1e-12);
  EXPECT_NEAR(r.raw_p, 1.0, 1e-9);
}

TEST(Histogram, ShapeSymmetricUnderSwap) {
  std::mt19937_64 rng(3);
  std::poisson_distribution<int> p1(200), p2(330);
  std::vector<std::uint64_t> a(60), b(60);
  for (int i = 0; i < 60; ++i) {
    a[i] = p1(rng) + (i > 30 ? 40 : 0);
    b[i] = p2(rng);
  }
  const auto r1 = shape_consistency(make(a), make(b));
  const auto r2 = shape_consistency(make(b), make(a));
  EXPECT_NEAR(r1.scale * r2.scale, 1.0, 1e-9);
  EXPECT_NEAR(r1.raw_p, r2.raw_p, 1e-9);
  EXPECT_NEAR(r1.chi2, r2.chi2, 1e-7);
}

TEST(Histogram, ShapeFitMinimizesChi2) {
  std::mt19937_64 rng(5);
  std::poisson_distribution<int> p1(100), p2(150);
  std::vector<std::uint64_t> a(40), b(40);
  for (int i = 0; i < 40; ++i) {
    a[i] = p1(rng);
    b[i] = p2(rng);
  }
  const auto r = shape_consistency(make(a), make(b));
  auto chi2 = [&](double s) {
    double c = 0;
    for (int i = 0; i < 40; ++i) {
      const double x = static_cast<double>(a[i]), y = static_cast<double>(b[i]);
      c += (x - s * y) * (x - s * y) / (x + s * s * y);
    }
    return c;
  };
  // Brute-force scan around the fitted scale.
  for (double f = 0.9; f <= 1.1; f += 0.001) EXPECT_LE(r.chi2, chi2(r.scale * f) + 1e-9);
  EXPECT_EQ(r.dof, r.usable_bins - 1);
}

TEST(Histogram, ShapePoolsSparseBins) {
  const auto h1 = make({10, 10, 10, 10, 3, 0, 0});
  const auto h2 = make({10, 10, 10, 10, 3, 1, 0});
  const auto r = shape_consistency(h1, h2, 25);
  EXPECT_EQ(r.input_bins, 7);
  // (20)(20)(20)(20)(6 1 0): pairs reach 40, the short tail joins the last pool.
  EXPECT_EQ(r.usable_bins, 2);
  EXPECT_THROW(shape_consistency(make({1, 1}), make({1, 1}), 25), DataError);
  EXPECT_THROW(shape_consistency(make({1, 1}), make({1, 1, 1}), 1), ArgumentError);
}

TEST(Histogram, NormalizedRatio) {
  const auto h = make({10, 40, 100, 30});
  EXPECT_DOUBLE_EQ(max_normalized_ratio(h, h), 100.0);
  EXPECT_DOUBLE_EQ(max_normalized_ratio(h, make({20, 80, 200, 60})), 100.0);
  // Flat background lifts the second histogram's normalized mass.
  const auto r = max_normalized_ratio(h, make({30, 60, 120, 50}));
  EXPECT_NEAR(r, 100.0 * (180.0 / 100.0) / (260.0 / 120.0), 1e-12);
  EXPECT_THROW(max_normalized_ratio(h, make({0, 0, 0, 0})), DataError);
  EXPECT_THROW(max_normalized_ratio(h, h, BinRegion{2, 9}), ArgumentError);
}

TEST(Histogram, CsvLayout) {
  const auto csv = to_csv(make({4, 9}));
  EXPECT_EQ(csv, "bin_start,count,sigma\n0,4,2\n4,9,3\n");
}
