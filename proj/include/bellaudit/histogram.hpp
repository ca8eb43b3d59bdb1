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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bellaudit/event_model.hpp"

namespace bellaudit {

struct HistogramKey {
  Party party = Party::A;
  int a = 0;
  int b = 0;
  friend auto operator<=>(const HistogramKey&, const HistogramKey&) = default;
};

struct UniformBins {
  double origin = 0.0;
  double width = 1.0;
  int count = 1;

  void validate() const;
  double start(int i) const { return origin + width * i; }
  friend bool operator==(const UniformBins&, const UniformBins&) = default;
};

struct Histogram {
  HistogramKey key;
  UniformBins bins;
  std::vector<std::uint64_t> counts;  // size == bins.count

  std::uint64_t total() const;
  // Poisson error sqrt(N) of bin i.
  double sigma(int i) const;
};

struct HistogramSet {
  std::map<std::pair<int, int>, Histogram> by_choice;  // (a, b)
  std::uint64_t below_range = 0;
  std::uint64_t above_range = 0;
  std::uint64_t unattributed = 0;  // clicks on records missing a choice
};

// Bins the time offsets of `party`'s tags on records where that party's
// outcome is Click, split by the (a, b) choice pair.
HistogramSet bin_time_tags(const Dataset& d, Party party, double bin_width_ns, int bin_count,
                           double origin_ns = 0.0);

// Parses "250x4ns" (count x width) into bins with the given origin.
UniformBins parse_bin_spec(const std::string& spec, double origin_ns = 0.0);

inline constexpr int kGridPulseWidth = 50;
inline constexpr int kGridPhaseWidth = 20;
inline constexpr int kGridPulseBins = kMaxPulse / kGridPulseWidth;     // 16; pulse 800 folds into the last
inline constexpr int kGridPhaseBins = kPhaseDomain / kGridPhaseWidth;  // 8

struct Grid2D {
  HistogramKey key;
  std::array<std::array<std::uint64_t, kGridPhaseBins>, kGridPulseBins> counts{};

  std::uint64_t total() const;
};

struct GridSet {
  std::map<std::pair<int, int>, Grid2D> by_choice;
  std::uint64_t tags_used = 0;
  std::vector<std::string> notes;
};

// Pulse x phase grid (bins of 50 x 20) of `party`'s click tags.
GridSet bin_grid(const Dataset& d, Party party);

struct ShapeTestResult {
  double scale = 1.0;  // fitted s in h1 ~ s * h2
  double chi2 = 0.0;
  int dof = 0;
  double raw_p = 1.0;
  double max_ratio_deviation = 0.0;
  int usable_bins = 0;
  int input_bins = 0;
};

inline constexpr int kDefaultMinCount = 25;

// Tests h1(t) = s * h2(t) for a single s over all bins. Adjacent bins are
// pooled left to right until h1 + h2 >= min_count; a short tail joins the
// last pooled bin. s minimizes sum (h1 - s h2)^2 / (h1 + s^2 h2), and the
// minimum is referred to chi-squared with usable_bins - 1 dof.
// Throws ArgumentError on mismatched bins, DataError if < 2 usable bins.
ShapeTestResult shape_consistency(const Histogram& h1, const Histogram& h2,
                                  int min_count = kDefaultMinCount);

struct BinRegion {
  int first = 0;
  int last = 0;  // inclusive
};

// Each histogram is divided by its own maximum; returns
// 100 * sum_region(h1 / max h1) / sum_region(h2 / max h2).
// Default region is every bin.
double max_normalized_ratio(const Histogram& h1, const Histogram& h2,
                            std::optional<BinRegion> region = std::nullopt);

inline constexpr const char* kRatioDefinition =
    "each histogram is divided by its own maximum bin; the statistic is "
    "100 * (sum of rescaled h1 over the region) / (sum of rescaled h2 over the region)";

// CSV with header `bin_start,count,sigma`.
std::string to_csv(const Histogram& h);
// CSV with header `pulse_start,phase_start,count,sigma`.
std::string to_csv(const Grid2D& g);

}  // namespace bellaudit
