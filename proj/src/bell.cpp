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

#include "bellaudit/bell.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bellaudit/errors.hpp"

namespace bellaudit {

namespace {

std::optional<int> spin(const std::optional<Outcome>& o) {
  if (o == Outcome::Plus) return 1;
  if (o == Outcome::Minus) return -1;
  return std::nullopt;
}

}  // namespace

CorrelationEstimate estimate_correlation(const Dataset& d, int a_bit, int b_bit) {
  std::uint64_t same = 0, diff = 0;
  for (const auto& r : d.records) {
    if (!r.choice_a || !r.choice_b) continue;
    if (r.choice_a->value() != a_bit || r.choice_b->value() != b_bit) continue;
    const auto sa = spin(r.outcome_a);
    const auto sb = spin(r.outcome_b);
    if (!sa || !sb) continue;
    (*sa == *sb ? same : diff) += 1;
  }
  const std::uint64_t n = same + diff;
  if (n == 0) {
    throw DataError("no records with two spin outcomes at setting (" + std::to_string(a_bit) + "," +
                    std::to_string(b_bit) + ")");
  }
  CorrelationEstimate e;
  e.bits = {a_bit, b_bit};
  e.n = n;
  e.E = (static_cast<double>(same) - static_cast<double>(diff)) / static_cast<double>(n);
  e.sigma = std::sqrt(std::max(0.0, 1.0 - e.E * e.E) / static_cast<double>(n));
  return e;
}

ChshSigns parse_signs(std::string_view s) {
  if (s.size() != 4) throw ArgumentError("CHSH signs must be four characters of + and -");
  ChshSigns out{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (s[i] == '+') {
      out[i] = 1;
    } else if (s[i] == '-') {
      out[i] = -1;
    } else {
      throw ArgumentError("CHSH signs must be four characters of + and -");
    }
  }
  return out;
}

std::string format_signs(const ChshSigns& s) {
  std::string out;
  for (int v : s) out += v > 0 ? '+' : '-';
  return out;
}

ChshResult chsh_from_terms(const std::array<CorrelationEstimate, 4>& terms, const ChshSigns& signs) {
  ChshResult r;
  r.terms = terms;
  r.signs = signs;
  double var = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw ArgumentError("CHSH signs must be +1 or -1");
    r.S += signs[i] * terms[i].E;
    const double s = terms[i].sigma.value_or(0.0);
    var += s * s;
  }
  r.sigma_S = std::sqrt(var);
  return r;
}

ChshResult chsh(const Dataset& d, const ChshSigns& signs) {
  std::array<CorrelationEstimate, 4> terms;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) terms[static_cast<std::size_t>(2 * a + b)] = estimate_correlation(d, a, b);
  }
  return chsh_from_terms(terms, signs);
}

TestReport visibility_consistency(std::span<const CorrelationEstimate> estimates,
                                  const std::string& experiment) {
  if (estimates.size() < 2) throw ArgumentError("visibility test needs at least 2 correlation estimates");
  for (const auto& e : estimates) {
    if (!e.sigma) throw ArgumentError("visibility test needs a sigma on every estimate");
  }
  TestReport r;
  r.name = "visibility_consistency";
  r.category = TestCategory::Model;
  r.experiment = experiment;
  double max_z = 0.0;
  std::size_t pairs = 0, best_i = 0, best_j = 1;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    for (std::size_t j = i + 1; j < estimates.size(); ++j) {
      ++pairs;
      const double si = *estimates[i].sigma, sj = *estimates[j].sigma;
      const double denom = std::sqrt(si * si + sj * sj);
      const double d = std::abs(std::abs(estimates[i].E) - std::abs(estimates[j].E));
      double z = 0.0;
      if (denom > 0.0) {
        z = d / denom;
      } else if (d > 0.0) {
        z = std::numeric_limits<double>::infinity();
      }
      if (z > max_z || pairs == 1) {
        max_z = z;
        best_i = i;
        best_j = j;
      }
    }
  }
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto idx = std::to_string(i);
    r.inputs["E_" + idx] = estimates[i].E;
    r.inputs["sigma_" + idx] = *estimates[i].sigma;
    if (estimates[i].ideal_magnitude) r.inputs["ideal_" + idx] = *estimates[i].ideal_magnitude;
  }
  const double diff = std::abs(std::abs(estimates[best_i].E) - std::abs(estimates[best_j].E));
  r.inputs["max_abs_difference"] = diff;
  r.inputs["pairs"] = static_cast<double>(pairs);
  r.statistic = max_z;
  r.p = lee_correct(PValue::from_raw(2.0 * normal_sf(max_z)), static_cast<double>(pairs));
  std::ostringstream os;
  os.precision(4);
  os << "largest magnitude difference between estimates " << best_i << " and " << best_j << ": " << diff
     << " (" << max_z << " standard deviations)";
  r.notes.push_back(os.str());
  r.notes.push_back("Bonferroni factor = number of estimate pairs; a common visibility scales all |E| alike");
  return r;
}

}  // namespace bellaudit
