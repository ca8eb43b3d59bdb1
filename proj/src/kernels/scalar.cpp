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

#include <cmath>

#include "bellaudit/kernels/kernels.hpp"

namespace bellaudit::kernels::scalar {

KeyCounts count_keys(std::span<const std::uint8_t> keys) {
  KeyCounts counts{};
  for (auto k : keys) {
    if (k < 4) ++counts[k];
  }
  return counts;
}

void accumulate_bins(std::span<const double> values, double origin, double width,
                     std::span<std::uint64_t> counts, BinOverflow& overflow) {
  const auto n = static_cast<double>(counts.size());
  for (double v : values) {
    double idx = std::floor((v - origin) / width);
    if (!(idx >= 0.0)) {  // NaN lands here too
      ++overflow.below;
    } else if (idx >= n) {
      ++overflow.above;
    } else {
      ++counts[static_cast<std::size_t>(idx)];
    }
  }
}

double sum_exp(std::span<const double> x, double shift) {
  double total = 0.0;
  for (double v : x) total += std::exp(v - shift);
  return total;
}

ShapeTerms shape_terms(std::span<const double> x, std::span<const double> y, double s) {
  ShapeTerms t;
  const double s2 = s * s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double den = x[i] + s2 * y[i];
    if (den == 0.0) continue;
    const double num = x[i] - s * y[i];
    t.chi2 += num * num / den;
    t.g += x[i] * y[i] * num / (den * den);
  }
  return t;
}

}  // namespace bellaudit::kernels::scalar
