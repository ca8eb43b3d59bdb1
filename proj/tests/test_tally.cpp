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

#include "bellaudit/errors.hpp"
#include "bellaudit/tally.hpp"

using namespace bellaudit;

namespace {

// Heralded records reproducing a published table (rows b, columns a).
Dataset heralded(std::uint64_t n00, std::uint64_t n10, std::uint64_t n01, std::uint64_t n11) {
  Dataset d;
  std::int64_t id = 0;
  auto add = [&](int a, int b, std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) {
      TrialRecord r;
      r.trial_id = id++;
      r.choice_a = Choice(a);
      r.choice_b = Choice(b);
      r.herald = Outcome::Click;
      d.records.push_back(r);
      r.trial_id = id++;
      r.herald = Outcome::NoClick;
      d.records.push_back(r);
    }
  };
  add(0, 0, n00);
  add(1, 0, n10);
  add(0, 1, n01);
  add(1, 1, n11);
  return d;
}

}  // namespace

TEST(Tally, DelftRunOneLayout) {
  const auto d = heralded(53, 62, 79, 51);
  const auto res = build_table(d, Predicate::HeraldClick);
  EXPECT_EQ(res.table.n[0][0], 53u);
  EXPECT_EQ(res.table.n[1][0], 62u);
  EXPECT_EQ(res.table.n[0][1], 79u);
  EXPECT_EQ(res.table.n[1][1], 51u);
  EXPECT_EQ(res.table.total(), 245u);
  ASSERT_TRUE(res.table.total_trials);
  EXPECT_EQ((*res.table.total_trials)[1], 158u);
  EXPECT_EQ(res.unattributed, 0u);
  EXPECT_EQ(render_text(res.table),
            "C=1 |   0 |   1 | a\n"
            "  0 |  53 |  62 |\n"
            "  1 |  79 |  51 |\n"
            "  b\n");
}

TEST(Tally, IndependenceProductsTableOne) {
  CountTable2x2 t;
  t.n = {{{53, 79}, {62, 51}}};
  const auto [diag, off] = independence_products(t);
  EXPECT_EQ(diag, 2703.0);
  EXPECT_EQ(off, 4898.0);
}

TEST(Tally, PredicatesAndUnattributed) {
  Dataset d;
  TrialRecord r;
  r.trial_id = 1;
  r.choice_a = Choice(1);
  r.choice_b = Choice(0);
  r.outcome_a = Outcome::Plus;
  r.outcome_b = Outcome::Minus;
  d.records.push_back(r);
  r.trial_id = 2;
  r.choice_b.reset();
  d.records.push_back(r);
  auto res = build_table(d, parse_predicate("A=+1"));
  EXPECT_EQ(res.table.n[1][0], 1u);
  EXPECT_EQ(res.unattributed, 1u);
  res = build_table(d, parse_predicate("B=-1"));
  EXPECT_EQ(res.table.n[1][0], 1u);
  EXPECT_EQ(build_table(d, parse_predicate("B=1")).table.total(), 0u);
  EXPECT_THROW(parse_predicate("D=1"), ArgumentError);
  EXPECT_EQ(predicate_party(Predicate::BMinus), Party::B);
}

TEST(Tally, ConcatenationIsAdditive) {
  const auto d1 = heralded(3, 1, 4, 1);
  const auto d2 = heralded(5, 9, 2, 6);
  Dataset both = d1;
  for (auto r : d2.records) {
    r.trial_id += 1000;
    both.records.push_back(r);
  }
  auto t = build_table(d1, Predicate::HeraldClick).table;
  t += build_table(d2, Predicate::HeraldClick).table;
  EXPECT_EQ(t, build_table(both, Predicate::HeraldClick).table);
}

TEST(Tally, PairCells) {
  const auto c = cells(PairSelector::AFixedA0);
  EXPECT_EQ(c.a1, 0);
  EXPECT_EQ(c.b1, 0);
  EXPECT_EQ(c.a2, 0);
  EXPECT_EQ(c.b2, 1);
  const auto d = cells(PairSelector::BFixedB0);
  EXPECT_EQ(d.a2, 1);
  EXPECT_EQ(d.b2, 0);
}
