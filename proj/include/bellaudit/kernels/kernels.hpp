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

// Data-parallel inner loops. Every kernel has a scalar reference in
// kernels::scalar and, on x86-64, an AVX2 variant in kernels::avx2. The
// unqualified entry points dispatch to the best variant the CPU supports;
// BELLAUDIT_SIMD=scalar in the environment forces the reference path.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace bellaudit::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);
bool isa_supported(Isa isa);
Isa active_isa();
// Throws ArgumentError if the CPU lacks `isa`.
void set_active_isa(Isa isa);

// Counts occurrences of key values 0..3; any other byte value is ignored.
using KeyCounts = std::array<std::uint64_t, 4>;

struct BinOverflow {
  std::uint64_t below = 0;
  std::uint64_t above = 0;
};

// chi2(s) = sum (x - s*y)^2 / (x + s^2*y) and the root function
// g(s) = sum x*y*(x - s*y) / (x + s^2*y)^2, whose zero is the chi2 minimum
// for s > 0. Terms with a zero denominator are skipped.
struct ShapeTerms {
  double chi2 = 0.0;
  double g = 0.0;
};

KeyCounts count_keys(std::span<const std::uint8_t> keys);

// Adds floor((v - origin) / width) into counts for in-range indices.
void accumulate_bins(std::span<const double> values, double origin, double width,
                     std::span<std::uint64_t> counts, BinOverflow& overflow);

// sum_i exp(x_i - shift)
double sum_exp(std::span<const double> x, double shift);

ShapeTerms shape_terms(std::span<const double> x, std::span<const double> y, double s);

namespace scalar {
KeyCounts count_keys(std::span<const std::uint8_t> keys);
void accumulate_bins(std::span<const double> values, double origin, double width,
                     std::span<std::uint64_t> counts, BinOverflow& overflow);
double sum_exp(std::span<const double> x, double shift);
ShapeTerms shape_terms(std::span<const double> x, std::span<const double> y, double s);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define BELLAUDIT_HAVE_AVX2_KERNELS 1
namespace avx2 {
KeyCounts count_keys(std::span<const std::uint8_t> keys);
void accumulate_bins(std::span<const double> values, double origin, double width,
                     std::span<std::uint64_t> counts, BinOverflow& overflow);
double sum_exp(std::span<const double> x, double shift);
ShapeTerms shape_terms(std::span<const double> x, std::span<const double> y, double s);
}  // namespace avx2
#else
#define BELLAUDIT_HAVE_AVX2_KERNELS 0
#endif

}  // namespace bellaudit::kernels
