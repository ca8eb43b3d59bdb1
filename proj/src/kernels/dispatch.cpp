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

#include <atomic>
#include <cstdlib>
#include <string>

#include "bellaudit/errors.hpp"
#include "bellaudit/kernels/kernels.hpp"

namespace bellaudit::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("BELLAUDIT_SIMD")) {
    if (std::string_view(env) == "scalar") return Isa::Scalar;
  }
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "?";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if BELLAUDIT_HAVE_AVX2_KERNELS
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ArgumentError("instruction set not supported on this CPU: " + std::string(to_string(isa)));
  }
  current().store(isa, std::memory_order_relaxed);
}

#if BELLAUDIT_HAVE_AVX2_KERNELS
#define BELLAUDIT_DISPATCH(fn, ...) \
  (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define BELLAUDIT_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

KeyCounts count_keys(std::span<const std::uint8_t> keys) {
  return BELLAUDIT_DISPATCH(count_keys, keys);
}

void accumulate_bins(std::span<const double> values, double origin, double width,
                     std::span<std::uint64_t> counts, BinOverflow& overflow) {
  BELLAUDIT_DISPATCH(accumulate_bins, values, origin, width, counts, overflow);
}

double sum_exp(std::span<const double> x, double shift) {
  return BELLAUDIT_DISPATCH(sum_exp, x, shift);
}

ShapeTerms shape_terms(std::span<const double> x, std::span<const double> y, double s) {
  return BELLAUDIT_DISPATCH(shape_terms, x, y, s);
}

}  // namespace bellaudit::kernels
