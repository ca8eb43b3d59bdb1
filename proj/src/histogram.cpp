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

#include "bellaudit/histogram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bellaudit/errors.hpp"
#include "bellaudit/kernels/kernels.hpp"
#include "bellaudit/stats.hpp"

namespace bellaudit {

void UniformBins::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw ArgumentError("bin width must be > 0");
  if (count < 1) throw ArgumentError("bin count must be >= 1");
  if (!std::isfinite(origin)) throw ArgumentError("bin origin must be finite");
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double Histogram::sigma(int i) const { return std::sqrt(static_cast<double>(counts.at(i))); }

std::uint64_t Grid2D::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts) t += std::accumulate(row.begin(), row.end(), std::uint64_t{0});
  return t;
}

HistogramSet bin_time_tags(const Dataset& d, Party party, double bin_width_ns, int bin_count,
                           double origin_ns) {
  const UniformBins bins{origin_ns, bin_width_ns, bin_count};
  bins.validate();

  std::array<std::vector<double>, 4> times;
  HistogramSet out;
  for (const auto& r : d.records) {
    if (r.outcome(party) != Outcome::Click) continue;
    if (!r.choice_a || !r.choice_b) {
      ++out.unattributed;
      continue;
    }
    auto& bucket = times[2 * r.choice_a->value() + r.choice_b->value()];
    for (const auto& t : r.tags) {
      if (t.party == party && t.time_offset_ns) bucket.push_back(*t.time_offset_ns);
    }
  }
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      Histogram h{HistogramKey{party, a, b}, bins,
                  std::vector<std::uint64_t>(static_cast<std::size_t>(bin_count), 0)};
      kernels::BinOverflow overflow;
      kernels::accumulate_bins(times[2 * a + b], bins.origin, bins.width, h.counts, overflow);
      out.below_range += overflow.below;
      out.above_range += overflow.above;
      out.by_choice.emplace(std::make_pair(a, b), std::move(h));
    }
  }
  return out;
}

UniformBins parse_bin_spec(const std::string& spec, double origin_ns) {
  // <count>x<width>[ns]
  std::string_view s = spec;
  if (s.size() > 2 && s.substr(s.size() - 2) == "ns") s.remove_suffix(2);
  const auto x = s.find('x');
  if (x == std::string_view::npos) throw ArgumentError("bin spec must look like 250x4ns");
  UniformBins bins;
  bins.origin = origin_ns;
  auto count_part = s.substr(0, x);
  auto width_part = s.substr(x + 1);
  auto [p1, e1] = std::from_chars(count_part.data(), count_part.data() + count_part.size(), bins.count);
  auto [p2, e2] = std::from_chars(width_part.data(), width_part.data() + width_part.size(), bins.width);
  if (e1 != std::errc() || p1 != count_part.data() + count_part.size() || e2 != std::errc() ||
      p2 != width_part.data() + width_part.size()) {
    throw ArgumentError("bin spec must look like 250x4ns, got '" + spec + "'");
  }
  bins.validate();
  return bins;
}

GridSet bin_grid(const Dataset& d, Party party) {
  GridSet out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) out.by_choice[{a, b}].key = HistogramKey{party, a, b};
  }
  std::uint64_t skipped = 0;
  for (const auto& r : d.records) {
    if (r.outcome(party) != Outcome::Click || !r.choice_a || !r.choice_b) continue;
    auto& grid = out.by_choice[{r.choice_a->value(), r.choice_b->value()}];
    for (const auto& t : r.tags) {
      if (t.party != party) continue;
      if (!t.pulse || !t.phase) {
        ++skipped;
        continue;
      }
      const int pi = std::min(*t.pulse / kGridPulseWidth, kGridPulseBins - 1);
      const int ph = *t.phase / kGridPhaseWidth;
      ++grid.counts[static_cast<std::size_t>(pi)][static_cast<std::size_t>(ph)];
      ++out.tags_used;
    }
  }
  if (out.tags_used == 0) {
    out.notes.push_back("empty grid: no click tags for party " + std::string(to_string(party)) +
                        " carry both pulse and phase");
  } else if (skipped) {
    out.notes.push_back(std::to_string(skipped) + " click tags lacked pulse or phase and were skipped");
  }
  return out;
}

namespace {

void check_same_bins(const Histogram& h1, const Histogram& h2) {
  if (!(h1.bins == h2.bins) || h1.counts.size() != h2.counts.size()) {
    throw ArgumentError("histograms have different bin specifications");
  }
}

// Rightward pooling to at least min_count combined entries per bin.
void pool(const Histogram& h1, const Histogram& h2, int min_count, std::vector<double>& x,
          std::vector<double>& y) {
  double px = 0, py = 0;
  for (std::size_t i = 0; i < h1.counts.size(); ++i) {
    px += static_cast<double>(h1.counts[i]);
    py += static_cast<double>(h2.counts[i]);
    if (px + py >= min_count) {
      x.push_back(px);
      y.push_back(py);
      px = py = 0;
    }
  }
  if ((px > 0 || py > 0) && !x.empty()) {
    x.back() += px;
    y.back() += py;
  }
}

}  // namespace

ShapeTestResult shape_consistency(const Histogram& h1, const Histogram& h2, int min_count) {
  check_same_bins(h1, h2);
  if (min_count < 1) throw ArgumentError("min_count must be >= 1");

  std::vector<double> x, y;
  pool(h1, h2, min_count, x, y);
  if (x.size() < 2) {
    throw DataError("shape test needs at least 2 usable bins, have " + std::to_string(x.size()));
  }

  // The minimum lies between the smallest and largest per-bin ratio.
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0 && y[i] > 0) {
      lo = std::min(lo, x[i] / y[i]);
      hi = std::max(hi, x[i] / y[i]);
    }
  }
  if (!(hi > 0.0)) throw DataError("shape test needs bins populated in both histograms");

  double s = lo;
  if (hi > lo) {
    // g(s) is >= 0 at lo and <= 0 at hi; bisect in log space.
    double llo = std::log(lo), lhi = std::log(hi);
    for (int it = 0; it < 200 && lhi - llo > 1e-15; ++it) {
      const double mid = 0.5 * (llo + lhi);
      if (kernels::shape_terms(x, y, std::exp(mid)).g > 0.0) {
        llo = mid;
      } else {
        lhi = mid;
      }
    }
    s = std::exp(0.5 * (llo + lhi));
  }

  ShapeTestResult r;
  r.scale = s;
  r.chi2 = kernels::shape_terms(x, y, s).chi2;
  r.usable_bins = static_cast<int>(x.size());
  r.input_bins = static_cast<int>(h1.counts.size());
  r.dof = r.usable_bins - 1;
  r.raw_p = chi2_sf(r.chi2, r.dof);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0) r.max_ratio_deviation = std::max(r.max_ratio_deviation, std::abs(x[i] / (s * y[i]) - 1.0));
  }
  return r;
}

double max_normalized_ratio(const Histogram& h1, const Histogram& h2, std::optional<BinRegion> region) {
  check_same_bins(h1, h2);
  const int n = static_cast<int>(h1.counts.size());
  const BinRegion reg = region.value_or(BinRegion{0, n - 1});
  if (reg.first < 0 || reg.last >= n || reg.first > reg.last) {
    throw ArgumentError("ratio region outside the histogram");
  }
  const auto m1 = static_cast<double>(*std::max_element(h1.counts.begin(), h1.counts.end()));
  const auto m2 = static_cast<double>(*std::max_element(h2.counts.begin(), h2.counts.end()));
  if (m1 == 0.0 || m2 == 0.0) throw DataError("histogram maximum is zero; ratio undefined");
  double s1 = 0, s2 = 0;
  for (int i = reg.first; i <= reg.last; ++i) {
    s1 += static_cast<double>(h1.counts[i]);
    s2 += static_cast<double>(h2.counts[i]);
  }
  if (s2 == 0.0) throw DataError("second histogram is empty over the ratio region");
  return 100.0 * (s1 / m1) / (s2 / m2);
}

std::string to_csv(const Histogram& h) {
  std::ostringstream os;
  os.precision(10);
  os << "bin_start,count,sigma\n";
  for (int i = 0; i < static_cast<int>(h.counts.size()); ++i) {
    os << h.bins.start(i) << ',' << h.counts[i] << ',' << h.sigma(i) << '\n';
  }
  return os.str();
}

std::string to_csv(const Grid2D& g) {
  std::ostringstream os;
  os.precision(10);
  os << "pulse_start,phase_start,count,sigma\n";
  for (int p = 0; p < kGridPulseBins; ++p) {
    for (int q = 0; q < kGridPhaseBins; ++q) {
      const auto c = g.counts[p][q];
      os << p * kGridPulseWidth << ',' << q * kGridPhaseWidth << ',' << c << ','
         << std::sqrt(static_cast<double>(c)) << '\n';
    }
  }
  return os.str();
}

}  // namespace bellaudit
