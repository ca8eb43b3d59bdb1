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

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "bellaudit/bell.hpp"
#include "bellaudit/errors.hpp"
#include "bellaudit/simulator.hpp"
#include "bellaudit/tally.hpp"

using namespace bellaudit;
using cd = std::complex<double>;

namespace {

using Mat4 = std::array<std::array<cd, 4>, 4>;

// Projector onto the s eigenvector of e^{ix}|+><-| + e^{-ix}|-><+|,
// basis (+, -).
std::array<std::array<cd, 2>, 2> projector(double x, int s) {
  const std::array<cd, 2> v{1.0 / std::sqrt(2.0), double(s) * std::polar(1.0, -x) / std::sqrt(2.0)};
  std::array<std::array<cd, 2>, 2> p{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) p[i][j] = v[i] * std::conj(v[j]);
  return p;
}

// Tr(rho (P_s x P_t)) with rho = V|psi><psi| + (1 - V) * dephased part.
double oracle_probability(const QuantumModel& m, double a, double b, int s, int t) {
  std::array<cd, 4> psi{0.0, m.alpha, m.beta, 0.0};  // ++, +-, -+, --
  Mat4 rho{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      rho[i][j] = m.visibility * psi[i] * std::conj(psi[j]);
      if (i == j) rho[i][j] += (1.0 - m.visibility) * std::norm(psi[i]);
    }
  const auto pa = projector(a, s), pb = projector(b, t);
  cd tr = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) tr += rho[i][j] * pa[j / 2][i / 2] * pb[j % 2][i % 2];
  return tr.real();
}

SimulationConfig spin_config(std::uint64_t n, std::uint64_t seed) {
  SimulationConfig c;
  c.style = Style::Delft;
  c.n_trials = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Simulator, JointProbabilityMatchesDensityMatrix) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-4.0, 4.0), v01(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    QuantumModel m;
    const cd al(u(rng), u(rng)), be(u(rng), u(rng));
    const double norm = std::sqrt(std::norm(al) + std::norm(be));
    m.alpha = al / norm;
    m.beta = be / norm;
    m.visibility = v01(rng);
    const double a = u(rng), b = u(rng);
    double total = 0, marg_a = 0, marg_b = 0;
    for (int s : {1, -1})
      for (int t : {1, -1}) {
        const double p = joint_probability(m, a, b, s, t);
        ASSERT_NEAR(p, oracle_probability(m, a, b, s, t), 1e-12);
        total += p;
        if (s == 1) marg_a += p;
        if (t == 1) marg_b += p;
      }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(marg_a, 0.5, 1e-12);
    EXPECT_NEAR(marg_b, 0.5, 1e-12);
  }
}

TEST(Simulator, PsiStatesGiveCosineCorrelations) {
  const double pi = std::numbers::pi;
  for (double d : {0.0, pi / 4, pi / 2, 2.0}) {
    EXPECT_NEAR(quantum_correlation(QuantumModel::psi_plus(0.9), d, 0), 0.9 * std::cos(d), 1e-12);
    EXPECT_NEAR(quantum_correlation(QuantumModel::psi_minus(), d, 0), -std::cos(d), 1e-12);
  }
}

TEST(Simulator, LhvMixturesObeyClassicalBound) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 300; ++rep) {
    LhvModel m;
    double total = 0;
    for (int bits = 0; bits < 16; ++bits) {
      const double w = u(rng) < 0.3 ? 0.0 : u(rng);
      auto sign = [&](int k) { return (bits >> k) & 1 ? -1 : 1; };
      m.strategies.push_back({w, {sign(0), sign(1)}, {sign(2), sign(3)}});
      total += w;
    }
    if (total == 0) continue;
    for (auto& s : m.strategies) s.weight /= total;
    // Every placement of the single minus sign, and its overall negation.
    for (int minus = 0; minus < 4; ++minus)
      for (int flip : {1, -1}) {
        double S = 0;
        for (int k = 0; k < 4; ++k) S += flip * (k == minus ? -1 : 1) * lhv_expectation(m, k / 2, k % 2);
        EXPECT_LE(std::abs(S), 2.0 + 1e-12);
      }
  }
  EXPECT_DOUBLE_EQ(lhv_expectation(LhvModel::uniform_mixture(), 1, 0), 0.0);
}

TEST(Simulator, DeterministicAcrossThreadCounts) {
  auto c = spin_config(70000, 99);
  c.style = Style::Vienna;
  c.detector.efficiency = {0.8, 0.7};
  c.detector.dark_rate = {0.01, 0.02};
  c.detector.invalid_rate = 0.001;
  const auto one = generate(c, 1);
  const auto four = generate(c, 4);
  ASSERT_EQ(one.records.size(), 70000u);
  EXPECT_EQ(one.records, four.records);
  c.seed = 100;
  EXPECT_NE(generate(c, 2).records, one.records);
}

TEST(Simulator, EmptyRun) {
  const auto d = generate(spin_config(0, 1), 3);
  EXPECT_TRUE(d.records.empty());
  EXPECT_EQ(d.meta.at("n_trials"), "0");
  EXPECT_EQ(d.meta.at("generator"), "philox4x32-10");
}

TEST(Simulator, SpinStatisticsFollowModel) {
  auto c = spin_config(200000, 5);
  auto& q = std::get<QuantumModel>(c.model);
  q.visibility = 0.8;
  q.angle_a = {0.0, std::numbers::pi / 2};
  q.angle_b = {std::numbers::pi / 4, -std::numbers::pi / 4};
  c.detector.herald_probability = 0.5;
  const auto d = generate(c, 2);
  std::uint64_t heralded = 0;
  for (const auto& r : d.records) heralded += r.herald == Outcome::Click;
  EXPECT_NEAR(double(heralded) / 200000, 0.5, 5 * std::sqrt(0.25 / 200000));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const auto e = estimate_correlation(d, a, b);
      EXPECT_NEAR(e.E, quantum_correlation(q, q.angle_a[a], q.angle_b[b]), 5 * *e.sigma);
    }
  const auto s = chsh(d, parse_signs("+++-"));
  EXPECT_NEAR(s.S, 0.8 * kQuantumBound, 5 * s.sigma_S);
}

TEST(Simulator, HeraldSignalingShiftsRate) {
  auto c = spin_config(400000, 8);
  c.detector.herald_probability = 0.3;
  c.anomalies.herald_signaling = 0.05;
  const auto d = generate(c, 0);
  std::array<double, 2> n{}, k{};
  for (const auto& r : d.records) {
    const int b = r.choice_b->value();
    n[b] += 1;
    k[b] += r.herald == Outcome::Click;
  }
  EXPECT_NEAR(k[0] / n[0], 0.30, 5 * std::sqrt(0.21 / n[0]));
  EXPECT_NEAR(k[1] / n[1], 0.35, 5 * std::sqrt(0.2275 / n[1]));
}

TEST(Simulator, OutcomeSignalingOnClicks) {
  auto c = spin_config(400000, 12);
  c.style = Style::NIST;
  c.detector.efficiency = {0.6, 0.6};
  c.detector.dark_rate = {0.001, 0.001};
  c.anomalies.outcome_signaling = 0.02;
  const auto d = generate(c, 0);
  const double base = 1.0 - (1.0 - 0.3) * (1.0 - 0.001);
  std::array<double, 2> n{}, k{};
  for (const auto& r : d.records) {
    const int b = r.choice_b->value();
    n[b] += 1;
    k[b] += r.outcome_a == Outcome::Click;
  }
  EXPECT_NEAR(k[0] / n[0], base, 5 * std::sqrt(base * (1 - base) / n[0]));
  EXPECT_NEAR(k[1] / n[1], base + 0.02, 5 * std::sqrt(base * (1 - base) / n[1]));
}

TEST(Simulator, ChoiceCorrelation) {
  auto c = spin_config(100000, 3);
  c.anomalies.choice_correlation = 0.2;
  const auto d = generate(c, 0);
  double same = 0;
  for (const auto& r : d.records) same += r.choice_a == r.choice_b;
  EXPECT_NEAR(same / 100000, 0.6, 5 * std::sqrt(0.24 / 100000));
}

TEST(Simulator, NistTagsStayInDomain) {
  auto c = spin_config(50000, 4);
  c.style = Style::NIST;
  c.detector.efficiency = {0.7, 0.7};
  c.detector.dark_rate = {0.05, 0.05};
  c.detector.pulse_peak = {795, 0};
  c.detector.pulse_spread = 20;
  c.detector.phase_center = {0, 159};
  c.detector.phase_spread = 10;
  for (const auto& r : generate(c, 0).records)
    for (const auto& t : r.tags) {
      ASSERT_TRUE(t.pulse && t.phase);
      EXPECT_GE(*t.pulse, 0);
      EXPECT_LE(*t.pulse, kMaxPulse);
      EXPECT_GE(*t.phase, 0);
      EXPECT_LT(*t.phase, kPhaseDomain);
    }
}

TEST(Simulator, Validation) {
  auto c = spin_config(10, 1);
  c.detector.herald_probability = 0.98;
  c.anomalies.herald_signaling = 0.05;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = spin_config(10, 1);
  c.detector.efficiency[1] = 1.2;
  EXPECT_THROW(generate(c), ArgumentError);
  c = spin_config(10, 1);
  std::get<QuantumModel>(c.model).alpha = 1.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = spin_config(10, 1);
  c.model = LhvModel{{{0.5, {1, 1}, {1, 1}}}};
  EXPECT_THROW(c.validate(), ArgumentError);
  c = spin_config(10, 1);
  c.model = LhvModel{{{1.0, {1, 1}, {1, 1}}}};
  c.anomalies.outcome_signaling = 0.01;  // A is always +1
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Simulator, AngleParsing) {
  const double pi = std::numbers::pi;
  EXPECT_DOUBLE_EQ(parse_angle("pi/4"), pi / 4);
  EXPECT_DOUBLE_EQ(parse_angle("-3*pi/4"), -3 * pi / 4);
  EXPECT_DOUBLE_EQ(parse_angle(" pi "), pi);
  EXPECT_DOUBLE_EQ(parse_angle("0.25"), 0.25);
  EXPECT_THROW(parse_angle("pi/0"), ArgumentError);
  EXPECT_THROW(parse_angle("3pi"), ArgumentError);
  EXPECT_THROW(parse_angle("x"), ArgumentError);
}

TEST(Simulator, ConfigParsing) {
  const auto c = parse_config_string(
      "# comment\n"
      "style = nist\n"
      "state=psi-\n"
      "visibility=0.9  # trailing\n"
      "angle_b1=-pi/8\n"
      "efficiency_a=0.75\n"
      "shape_background_b1=0.3\n"
      "n_trials=123\nseed=77\n");
  EXPECT_EQ(c.style, Style::NIST);
  const auto& q = std::get<QuantumModel>(c.model);
  EXPECT_LT(q.beta.real(), 0);
  EXPECT_DOUBLE_EQ(q.visibility, 0.9);
  EXPECT_DOUBLE_EQ(q.angle_b[1], -std::numbers::pi / 8);
  EXPECT_DOUBLE_EQ(c.detector.efficiency[0], 0.75);
  EXPECT_DOUBLE_EQ(*c.anomalies.shape_background_b1, 0.3);
  EXPECT_EQ(c.n_trials, 123u);
  EXPECT_EQ(c.seed, 77u);

  const auto l = parse_config_string("lhv_strategies=0.25:++++,0.75:+--+\n");
  const auto& m = std::get<LhvModel>(l.model);
  ASSERT_EQ(m.strategies.size(), 2u);
  EXPECT_EQ(m.strategies[1].a_outcomes, (std::array<int, 2>{1, -1}));
  EXPECT_EQ(m.strategies[1].b_outcomes, (std::array<int, 2>{-1, 1}));

  EXPECT_THROW(parse_config_string("bogus=1\n"), ArgumentError);
  EXPECT_THROW(parse_config_string("seed\n"), ArgumentError);
  EXPECT_THROW(parse_config_string("seed=-1\n"), ArgumentError);
  EXPECT_THROW(parse_config_string("style=lab\n"), ArgumentError);
}
