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

#include "bellaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bellaudit/errors.hpp"
#include "bellaudit/kernels/kernels.hpp"

namespace bellaudit {

PValue PValue::from_raw(double raw) {
  raw = std::clamp(raw, 0.0, 1.0);
  return PValue{raw, 1.0, raw};
}

std::string_view to_string(TestCategory c) {
  switch (c) {
    case TestCategory::Signaling: return "signaling";
    case TestCategory::Independence: return "independence";
    case TestCategory::Model: return "model";
    case TestCategory::Other: return "other";
  }
  return "other";
}

std::optional<TestCategory> parse_category(std::string_view s) {
  if (s == "signaling") return TestCategory::Signaling;
  if (s == "independence") return TestCategory::Independence;
  if (s == "model") return TestCategory::Model;
  if (s == "other") return TestCategory::Other;
  return std::nullopt;
}

std::string_view to_string(PairTest m) {
  return m == PairTest::ExactBinomial ? "exact" : "gauss";
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double chi2_sf(double x, int dof) {
  if (dof < 1) throw ArgumentError("chi-squared dof must be >= 1");
  if (x <= 0.0) return 1.0;
  if (dof == 1) return std::erfc(std::sqrt(0.5 * x));
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

namespace {

// log P(X = j) for X ~ Bin(n, 1/2). lgamma near n = 1e6 loses ~1e-9
// relative, so Boost's pmf is used unless it underflows.
double log_pmf_half(std::uint64_t j, std::uint64_t n) {
  const double pmf = boost::math::pdf(boost::math::binomial_distribution<double>(static_cast<double>(n), 0.5),
                                      static_cast<double>(j));
  if (pmf > std::numeric_limits<double>::min()) return std::log(pmf);
  const double dn = static_cast<double>(n);
  const double dj = static_cast<double>(j);
  return std::lgamma(dn + 1.0) - std::lgamma(dj + 1.0) - std::lgamma(dn - dj + 1.0) -
         dn * std::numbers::ln2;
}

// P(X <= j) for j <= n/2. Terms are generated downward from the largest
// (i = j) by the pmf ratio i / (n - i + 1), then summed as exponentials
// relative to that term.
double lower_tail_half(std::uint64_t j, std::uint64_t n) {
  // Below this relative log-weight terms cannot affect a double sum.
  constexpr double kNegligible = -745.0;
  std::vector<double> rel;
  rel.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(j + 1, 1u << 16)));
  double log_rel = 0.0;
  rel.push_back(0.0);
  for (std::uint64_t i = j; i > 0; --i) {
    log_rel += std::log(static_cast<double>(i)) - std::log(static_cast<double>(n - i + 1));
    if (log_rel < kNegligible) break;
    rel.push_back(log_rel);
  }
  const double sum = kernels::sum_exp(rel, 0.0);
  return std::exp(log_pmf_half(j, n) + std::log(sum));
}

}  // namespace

PValue binom_two_sided(std::uint64_t k, std::uint64_t n) {
  if (n < 1) throw ArgumentError("binomial test needs n >= 1");
  if (k > n) throw ArgumentError("binomial test needs k <= n");
  // With p = 1/2, P(X >= k) = P(X <= n - k), so the smaller tail is the
  // lower tail at min(k, n - k).
  const std::uint64_t j = std::min(k, n - k);
  const double tail = lower_tail_half(j, n);
  return PValue::from_raw(std::min(1.0, 2.0 * tail));
}

double gauss_z(std::uint64_t k, std::uint64_t n) {
  if (n < 1) throw ArgumentError("Gaussian test needs n >= 1");
  const double dn = static_cast<double>(n);
  return std::abs(static_cast<double>(k) - 0.5 * dn) / (0.5 * std::sqrt(dn));
}

PValue gauss_two_sided(std::uint64_t k, std::uint64_t n) {
  return PValue::from_raw(2.0 * normal_sf(gauss_z(k, n)));
}

Chi2Result pearson_chi2_2x2(const CountTable2x2& t) {
  double row[2] = {0, 0};
  double col[2] = {0, 0};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      row[a] += static_cast<double>(t.n[a][b]);
      col[b] += static_cast<double>(t.n[a][b]);
    }
  }
  if (row[0] == 0 || row[1] == 0 || col[0] == 0 || col[1] == 0) {
    throw DataError("degenerate 2x2 table: a row or column sum is zero");
  }
  const double total = row[0] + row[1];
  Chi2Result r;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double expected = row[a] * col[b] / total;
      const double diff = static_cast<double>(t.n[a][b]) - expected;
      r.chi2 += diff * diff / expected;
    }
  }
  r.raw_p = chi2_sf(r.chi2, 1);
  return r;
}

PValue lee_correct(const PValue& p, double factor) {
  if (!(factor >= 1.0)) throw ArgumentError("look-elsewhere factor must be >= 1");
  PValue out = p;
  out.correction_factor *= factor;
  out.corrected = std::min(1.0, out.raw * out.correction_factor);
  return out;
}

std::vector<PairSelector> default_pairs(const CountTable2x2& t) {
  const auto pred = parse_predicate(t.predicate_label);
  switch (predicate_party(pred)) {
    case Party::A: return {PairSelector::AFixedA0, PairSelector::AFixedA1};
    case Party::B: return {PairSelector::BFixedB0, PairSelector::BFixedB1};
    case Party::C: break;
  }
  return {PairSelector::AFixedA0, PairSelector::AFixedA1, PairSelector::BFixedB0,
          PairSelector::BFixedB1};
}

namespace {

std::string format_factor(double f) {
  std::ostringstream os;
  os.precision(6);
  os << f;
  return os.str();
}

void apply_factors(TestReport& r, const NosignalOptions& opts) {
  r.p = lee_correct(r.p, opts.lee_factor);
  r.notes.push_back("look-elsewhere factor " + format_factor(opts.lee_factor) +
                    " (rows and columns of the choice table)");
  for (const auto& [why, f] : opts.extra_factors) {
    r.p = lee_correct(r.p, f);
    r.notes.push_back("additional factor " + format_factor(f) + " (" + why + ")");
  }
}

}  // namespace

std::vector<TestReport> nosignal_suite(const CountTable2x2& t, const NosignalOptions& opts) {
  const auto pairs = opts.pairs.empty() ? default_pairs(t) : opts.pairs;
  std::vector<TestReport> out;
  for (auto sel : pairs) {
    const auto c = cells(sel);
    const std::uint64_t x = t.n[c.a1][c.b1];
    const std::uint64_t y = t.n[c.a2][c.b2];
    TestReport r;
    r.name = "nosignal[" + t.predicate_label + "] " + std::string(to_string(sel));
    r.category = TestCategory::Signaling;
    r.experiment = opts.experiment;
    r.inputs["n_first"] = static_cast<double>(x);
    r.inputs["n_second"] = static_cast<double>(y);
    const std::uint64_t n = x + y;
    if (n == 0) {
      r.notes.push_back("pair sum is zero; pair skipped");
      out.push_back(std::move(r));
      continue;
    }
    const std::uint64_t k = std::min(x, y);
    r.inputs["k"] = static_cast<double>(k);
    r.inputs["n"] = static_cast<double>(n);
    if (opts.method == PairTest::ExactBinomial) {
      r.p = binom_two_sided(k, n);
      r.statistic = static_cast<double>(k);
      r.notes.push_back("exact two-sided binomial test of k out of n at p=1/2");
    } else {
      r.p = gauss_two_sided(k, n);
      r.statistic = gauss_z(k, n);
      r.notes.push_back("Gaussian two-sided test, z = |k - n/2| / (sqrt(n)/2), no continuity correction");
    }
    r.notes.push_back("assumes equal numbers of attempts for the two settings");
    apply_factors(r, opts);
    out.push_back(std::move(r));
  }
  std::vector<TestReport> tested;
  for (const auto& r : out) {
    if (r.inputs.count("n")) tested.push_back(r);
  }
  if (!tested.empty()) {
    out.push_back(summarize_min(tested, "nosignal[" + t.predicate_label + "] min"));
  }
  return out;
}

TestReport summarize_min(std::span<const TestReport> reports, const std::string& name) {
  if (reports.empty()) throw DataError("no pair reports to summarize");
  const auto it = std::min_element(reports.begin(), reports.end(), [](const auto& l, const auto& r) {
    return l.p.raw < r.p.raw;
  });
  TestReport s = *it;
  s.name = name;
  s.notes.insert(s.notes.begin(), "smallest raw P among " + std::to_string(reports.size()) +
                                      " pairs, from: " + it->name);
  return s;
}

TestReport independence_report(const CountTable2x2& t, std::optional<double> reference_p,
                               const std::string& experiment) {
  TestReport r;
  r.name = "independence[" + t.predicate_label + "]";
  r.category = TestCategory::Independence;
  r.experiment = experiment;
  const auto [diag, off] = independence_products(t);
  r.inputs["n00"] = static_cast<double>(t.n[0][0]);
  r.inputs["n01"] = static_cast<double>(t.n[0][1]);
  r.inputs["n10"] = static_cast<double>(t.n[1][0]);
  r.inputs["n11"] = static_cast<double>(t.n[1][1]);
  r.inputs["product_n00_n11"] = diag;
  r.inputs["product_n01_n10"] = off;
  const auto chi = pearson_chi2_2x2(t);
  r.statistic = chi.chi2;
  r.p = PValue::from_raw(chi.raw_p);
  r.notes.push_back("Pearson chi-squared, 1 dof, margin-derived expectations, no continuity correction");
  if (reference_p) {
    r.inputs["reference_p"] = *reference_p;
    std::ostringstream os;
    os.precision(4);
    os << "reference P " << *reference_p << " is not reproduced by the standard Pearson formula (computed "
       << chi.raw_p << "); the variant behind the reference value is unknown";
    r.notes.push_back(os.str());
  }
  return r;
}

}  // namespace bellaudit
