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
#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bellaudit/event_model.hpp"

namespace bellaudit {

// alpha|+-> + beta|-+> measured with sigma_x = e^{ix}|+><-| + h.c. on each
// side. Visibility scales the interference (off-diagonal) part only.
struct QuantumModel {
  std::complex<double> alpha{std::numbers::sqrt2 / 2, 0.0};
  std::complex<double> beta{std::numbers::sqrt2 / 2, 0.0};
  double visibility = 1.0;
  std::array<double, 2> angle_a{0.0, 0.0};
  std::array<double, 2> angle_b{0.0, 0.0};

  void validate() const;
  static QuantumModel psi_plus(double visibility = 1.0);
  static QuantumModel psi_minus(double visibility = 1.0);
};

// p(A = s, B = t | a, b) = (1 + s t E) / 4 with
// E = V * 2 Re(conj(alpha) beta e^{i(a - b)}).
double joint_probability(const QuantumModel& m, double a, double b, int s, int t);
double quantum_correlation(const QuantumModel& m, double a, double b);

struct LhvStrategy {
  double weight = 1.0;
  std::array<int, 2> a_outcomes{1, 1};  // A for a = 0, 1
  std::array<int, 2> b_outcomes{1, 1};  // B for b = 0, 1
};

struct LhvModel {
  std::vector<LhvStrategy> strategies;

  void validate() const;
  // All 16 deterministic strategies with equal weight.
  static LhvModel uniform_mixture();
};

// Exact E(a_bit, b_bit) under the strategy mixture.
double lhv_expectation(const LhvModel& m, int a_bit, int b_bit);

enum class TimeResponseKind { Gaussian, Exponential };

struct DetectorModel {
  std::array<double, 2> efficiency{1.0, 1.0};  // A, B
  std::array<double, 2> dark_rate{0.0, 0.0};   // background clicks per trial
  double invalid_rate = 0.0;                   // click/no-click styles only
  double herald_probability = 1.0;             // Delft/Munich C = 1 rate

  TimeResponseKind time_response = TimeResponseKind::Gaussian;
  double time_mu_ns = 500.0;
  double time_sigma_ns = 40.0;
  double time_tau_ns = 100.0;
  double background_fraction = 0.0;  // uniform share of signal click times
  double time_window_ns = 1000.0;

  std::array<int, 2> pulse_peak{28, 37};
  double pulse_spread = 3.0;
  std::array<int, 2> phase_center{90, 125};
  double phase_spread = 3.0;

  void validate() const;
};

struct AnomalySpec {
  double herald_signaling = 0.0;   // added to p(C=1) when b = 1
  double outcome_signaling = 0.0;  // added to p(A=Click) (or p(A=+1)) when b = 1
  std::optional<double> shape_background_b1;  // B's background fraction when b = 1
  double choice_correlation = 0.0;  // P(b == a) = (1 + rho) / 2
};

enum class Style { Delft, NIST, Vienna, Munich };

std::string_view to_string(Style s);
Style parse_style(std::string_view s);

using Model = std::variant<QuantumModel, LhvModel>;

struct SimulationConfig {
  Style style = Style::Delft;
  Model model = QuantumModel{};
  DetectorModel detector;
  AnomalySpec anomalies;
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;

  // Throws ArgumentError if any probability (after anomalies) leaves [0, 1].
  void validate() const;
};

// Deterministic in (config, seed); threads only change speed. `threads` of
// 0 reads BELLAUDIT_THREADS, falling back to hardware concurrency.
Dataset generate(const SimulationConfig& config, unsigned threads = 0);

// key=value configuration (see presets/). Unknown keys throw ArgumentError.
// Values for angles accept plain numbers or forms like "pi/4", "-3*pi/4".
SimulationConfig parse_config(std::istream& in, SimulationConfig base = {});
SimulationConfig parse_config_string(std::string_view text, SimulationConfig base = {});
void apply_setting(SimulationConfig& config, std::string_view key, std::string_view value);
double parse_angle(std::string_view s);

unsigned default_thread_count();

}  // namespace bellaudit
