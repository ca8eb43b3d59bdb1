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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bellaudit/tally.hpp"

namespace bellaudit {

// A P-value together with the look-elsewhere factors applied to it.
// Invariant: corrected == min(1, raw * correction_factor).
struct PValue {
  double raw = 1.0;
  double correction_factor = 1.0;
  double corrected = 1.0;

  static PValue from_raw(double raw);
};

// What a report says something about; drives the summary table verdicts.
enum class TestCategory { Signaling, Independence, Model, Other };

std::string_view to_string(TestCategory c);
std::optional<TestCategory> parse_category(std::string_view s);

struct TestReport {
  std::string name;
  double statistic = 0.0;
  PValue p;
  std::map<std::string, double> inputs;
  std::vector<std::string> notes;
  TestCategory category = TestCategory::Other;
  std::string experiment;  // free-form grouping key, e.g. "delft"
};

// Standard normal upper tail 1 - Phi(z), via erfc.
double normal_sf(double z);
// Chi-squared survival function with `dof` degrees of freedom.
double chi2_sf(double x, int dof);

// Exact two-sided binomial test against p = 1/2:
// raw = min(1, 2 * min(P(X <= k), P(X >= k))), X ~ Bin(n, 1/2).
// Tail sums run in log space. Throws ArgumentError unless 0 <= k <= n, n >= 1.
PValue binom_two_sided(std::uint64_t k, std::uint64_t n);

// Gaussian approximation of the same test, no continuity correction:
// z = |k - n/2| / (sqrt(n)/2), raw = 2 * (1 - Phi(z)).
PValue gauss_two_sided(std::uint64_t k, std::uint64_t n);
double gauss_z(std::uint64_t k, std::uint64_t n);

struct Chi2Result {
  double chi2 = 0.0;
  double raw_p = 1.0;
};

// Pearson chi-squared test of independence on a 2x2 table (1 dof, no
// continuity correction). Throws DataError on a zero row or column sum.
Chi2Result pearson_chi2_2x2(const CountTable2x2& t);

// Multiplies the accumulated correction factor by `factor` (>= 1).
PValue lee_correct(const PValue& p, double factor);

enum class PairTest { ExactBinomial, Gaussian };

std::string_view to_string(PairTest m);

struct NosignalOptions {
  PairTest method = PairTest::ExactBinomial;
  double lee_factor = 4.0;
  // Further factors composed after lee_factor, e.g. window rescaling.
  std::vector<std::pair<std::string, double>> extra_factors;
  // Pairs to test; empty picks the no-signaling pairs for the table's
  // predicate (all four for C, b varying for A, a varying for B).
  std::vector<PairSelector> pairs;
  std::string experiment;
};

std::vector<PairSelector> default_pairs(const CountTable2x2& t);

// One report per pair plus a trailing "min" summary report whose P is the
// smallest raw pair P with the same correction factors.
std::vector<TestReport> nosignal_suite(const CountTable2x2& t, const NosignalOptions& opts = {});

// Smallest-raw-P summary over a set of pair reports (e.g. A and B tables
// tested jointly). Throws DataError if `reports` is empty.
TestReport summarize_min(std::span<const TestReport> reports, const std::string& name);

// Independence test report: products, Pearson statistic and, when given,
// a reference P-value quoted next to the computed one.
TestReport independence_report(const CountTable2x2& t, std::optional<double> reference_p,
                               const std::string& experiment = {});

}  // namespace bellaudit
