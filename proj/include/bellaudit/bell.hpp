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
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bellaudit/event_model.hpp"
#include "bellaudit/stats.hpp"

namespace bellaudit {

struct CorrelationEstimate {
  std::optional<std::pair<int, int>> bits;         // (a_bit, b_bit)
  std::optional<std::pair<double, double>> angles;  // radians
  double E = 0.0;
  // Absent when the estimate was typed in without an error bar.
  std::optional<double> sigma;
  std::uint64_t n = 0;
  // Magnitude predicted by the ideal model, e.g. 1/sqrt(2).
  std::optional<double> ideal_magnitude;
};

// E = (N_same - N_diff) / (N_same + N_diff) over records at (a_bit, b_bit)
// where both outcomes are Plus or Minus; sigma = sqrt((1 - E^2) / n).
// Throws DataError when no such record exists.
CorrelationEstimate estimate_correlation(const Dataset& d, int a_bit, int b_bit);

inline constexpr double kClassicalBound = 2.0;
inline constexpr double kQuantumBound = 2.0 * std::numbers::sqrt2;

using ChshSigns = std::array<int, 4>;  // each +1 or -1, order 00, 01, 10, 11

// Parses "+++-" style strings; throws ArgumentError otherwise.
ChshSigns parse_signs(std::string_view s);
std::string format_signs(const ChshSigns& s);

struct ChshResult {
  double S = 0.0;
  double sigma_S = 0.0;
  std::array<CorrelationEstimate, 4> terms;
  ChshSigns signs{1, 1, 1, -1};
  double classical_bound = kClassicalBound;
  double quantum_bound = kQuantumBound;
};

ChshResult chsh(const Dataset& d, const ChshSigns& signs);
ChshResult chsh_from_terms(const std::array<CorrelationEstimate, 4>& terms, const ChshSigns& signs);

// Pairwise test that all |E_i| are equal: z_ij = ||E_i| - |E_j|| /
// sqrt(sigma_i^2 + sigma_j^2). The report carries the largest z and its
// two-sided Gaussian P, Bonferroni-corrected by the number of pairs.
// Throws ArgumentError with fewer than 2 estimates or a missing sigma.
TestReport visibility_consistency(std::span<const CorrelationEstimate> estimates,
                                  const std::string& experiment = {});

}  // namespace bellaudit
