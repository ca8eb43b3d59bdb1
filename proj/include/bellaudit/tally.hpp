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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "bellaudit/event_model.hpp"

namespace bellaudit {

// Which outcome a table counts.
enum class Predicate { HeraldClick, AClick, BClick, AMinus, BMinus };

std::string_view label(Predicate p);
// Accepts "C=1", "A=1", "B=1", "A=+1", "B=+1", "A=-1", "B=-1".
Predicate parse_predicate(std::string_view s);
// The party whose outcome the predicate inspects.
Party predicate_party(Predicate p);
bool satisfies(const TrialRecord& r, Predicate p);

// Choice-conditioned counts n[a][b].
struct CountTable2x2 {
  std::array<std::array<std::uint64_t, 2>, 2> n{};
  std::string predicate_label = "C=1";
  std::optional<std::array<std::uint64_t, 4>> total_trials;  // index 2a+b

  std::uint64_t total() const { return n[0][0] + n[0][1] + n[1][0] + n[1][1]; }
  CountTable2x2& operator+=(const CountTable2x2& other);
  friend bool operator==(const CountTable2x2&, const CountTable2x2&) = default;
};

struct TallyResult {
  CountTable2x2 table;
  std::uint64_t unattributed = 0;  // satisfying records missing a choice
};

TallyResult build_table(const Dataset& d, Predicate p);

// Two cells differing in one choice bit.
enum class PairSelector { AFixedA0, AFixedA1, BFixedB0, BFixedB1 };

struct CellPair {
  int a1, b1, a2, b2;
};
CellPair cells(PairSelector s);
std::string_view to_string(PairSelector s);

// (n00*n11, n01*n10); equal in expectation under choice independence.
std::pair<double, double> independence_products(const CountTable2x2& t);

// Aligned text, columns a = 0, 1 and rows b = 0, 1.
// With transpose, rows are a and columns b.
std::string render_text(const CountTable2x2& t, bool transpose = false);

}  // namespace bellaudit
