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

#include "bellaudit/tally.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "bellaudit/errors.hpp"
#include "bellaudit/kernels/kernels.hpp"

namespace bellaudit {

std::string_view label(Predicate p) {
  switch (p) {
    case Predicate::HeraldClick: return "C=1";
    case Predicate::AClick: return "A=1";
    case Predicate::BClick: return "B=1";
    case Predicate::AMinus: return "A=-1";
    case Predicate::BMinus: return "B=-1";
  }
  return "?";
}

Predicate parse_predicate(std::string_view s) {
  if (s == "C=1") return Predicate::HeraldClick;
  if (s == "A=1" || s == "A=+1") return Predicate::AClick;
  if (s == "B=1" || s == "B=+1") return Predicate::BClick;
  if (s == "A=-1") return Predicate::AMinus;
  if (s == "B=-1") return Predicate::BMinus;
  throw ArgumentError("unknown predicate '" + std::string(s) + "' (use C=1, A=1, B=1, A=-1, B=-1)");
}

Party predicate_party(Predicate p) {
  switch (p) {
    case Predicate::HeraldClick: return Party::C;
    case Predicate::AClick:
    case Predicate::AMinus: return Party::A;
    case Predicate::BClick:
    case Predicate::BMinus: return Party::B;
  }
  return Party::C;
}

bool satisfies(const TrialRecord& r, Predicate p) {
  switch (p) {
    case Predicate::HeraldClick:
      return r.herald == Outcome::Click;
    case Predicate::AClick:
      return r.outcome_a == Outcome::Click || r.outcome_a == Outcome::Plus;
    case Predicate::BClick:
      return r.outcome_b == Outcome::Click || r.outcome_b == Outcome::Plus;
    case Predicate::AMinus:
      return r.outcome_a == Outcome::Minus;
    case Predicate::BMinus:
      return r.outcome_b == Outcome::Minus;
  }
  return false;
}

CountTable2x2& CountTable2x2::operator+=(const CountTable2x2& other) {
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) n[a][b] += other.n[a][b];
  }
  if (total_trials && other.total_trials) {
    for (int i = 0; i < 4; ++i) (*total_trials)[i] += (*other.total_trials)[i];
  } else {
    total_trials.reset();
  }
  return *this;
}

TallyResult build_table(const Dataset& d, Predicate p) {
  constexpr std::uint8_t kSkip = 0xFF;
  std::vector<std::uint8_t> hit_keys(d.records.size(), kSkip);
  std::vector<std::uint8_t> trial_keys(d.records.size(), kSkip);
  TallyResult result;
  result.table.predicate_label = std::string(label(p));
  std::size_t i = 0;
  for (const auto& r : d.records) {
    if (r.choice_a && r.choice_b) {
      const auto key = static_cast<std::uint8_t>(2 * r.choice_a->value() + r.choice_b->value());
      trial_keys[i] = key;
      if (satisfies(r, p)) hit_keys[i] = key;
    } else if (satisfies(r, p)) {
      ++result.unattributed;
    }
    ++i;
  }
  const auto hits = kernels::count_keys(hit_keys);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) result.table.n[a][b] = hits[2 * a + b];
  }
  result.table.total_trials = kernels::count_keys(trial_keys);
  return result;
}

CellPair cells(PairSelector s) {
  switch (s) {
    case PairSelector::AFixedA0: return {0, 0, 0, 1};
    case PairSelector::AFixedA1: return {1, 0, 1, 1};
    case PairSelector::BFixedB0: return {0, 0, 1, 0};
    case PairSelector::BFixedB1: return {0, 1, 1, 1};
  }
  return {0, 0, 0, 1};
}

std::string_view to_string(PairSelector s) {
  switch (s) {
    case PairSelector::AFixedA0: return "a=0: b=0 vs b=1";
    case PairSelector::AFixedA1: return "a=1: b=0 vs b=1";
    case PairSelector::BFixedB0: return "b=0: a=0 vs a=1";
    case PairSelector::BFixedB1: return "b=1: a=0 vs a=1";
  }
  return "?";
}

std::pair<double, double> independence_products(const CountTable2x2& t) {
  return {static_cast<double>(t.n[0][0]) * static_cast<double>(t.n[1][1]),
          static_cast<double>(t.n[0][1]) * static_cast<double>(t.n[1][0])};
}

std::string render_text(const CountTable2x2& t, bool transpose) {
  const char* col = transpose ? "b" : "a";
  const char* row = transpose ? "a" : "b";
  auto cell = [&](int r, int c) { return transpose ? t.n[r][c] : t.n[c][r]; };
  std::size_t width = t.predicate_label.size();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) width = std::max(width, std::to_string(cell(r, c)).size());
  }
  auto pad = [&](const std::string& s) { return std::string(width - std::min(width, s.size()), ' ') + s; };
  std::ostringstream os;
  os << pad(t.predicate_label) << " | " << pad("0") << " | " << pad("1") << " | " << col << '\n';
  for (int r = 0; r < 2; ++r) {
    os << pad(std::to_string(r)) << " | " << pad(std::to_string(cell(r, 0))) << " | "
       << pad(std::to_string(cell(r, 1))) << " |\n";
  }
  os << pad(row) << '\n';
  return os.str();
}

}  // namespace bellaudit
