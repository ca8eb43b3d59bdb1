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

#include "bellaudit/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "bellaudit/errors.hpp"
#include "bellaudit/philox.hpp"

namespace bellaudit {

void QuantumModel::validate() const {
  const double norm = std::norm(alpha) + std::norm(beta);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw ArgumentError("quantum model: |alpha|^2 + |beta|^2 must be 1");
  }
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw ArgumentError("visibility must be in [0,1]");
}

QuantumModel QuantumModel::psi_plus(double visibility) {
  QuantumModel m;
  m.visibility = visibility;
  return m;
}

QuantumModel QuantumModel::psi_minus(double visibility) {
  QuantumModel m;
  m.beta = -m.beta;
  m.visibility = visibility;
  return m;
}

double quantum_correlation(const QuantumModel& m, double a, double b) {
  const std::complex<double> phase = std::polar(1.0, a - b);
  return m.visibility * 2.0 * std::real(std::conj(m.alpha) * m.beta * phase);
}

double joint_probability(const QuantumModel& m, double a, double b, int s, int t) {
  return 0.25 * (1.0 + s * t * quantum_correlation(m, a, b));
}

void LhvModel::validate() const {
  if (strategies.empty()) throw ArgumentError("LHV model needs at least one strategy");
  double total = 0.0;
  for (const auto& st : strategies) {
    if (!(st.weight >= 0.0)) throw ArgumentError("LHV strategy weights must be >= 0");
    for (int v : st.a_outcomes) {
      if (v != 1 && v != -1) throw ArgumentError("LHV outcomes must be +1 or -1");
    }
    for (int v : st.b_outcomes) {
      if (v != 1 && v != -1) throw ArgumentError("LHV outcomes must be +1 or -1");
    }
    total += st.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ArgumentError("LHV strategy weights must sum to 1");
}

LhvModel LhvModel::uniform_mixture() {
  LhvModel m;
  for (int bits = 0; bits < 16; ++bits) {
    auto sign = [&](int k) { return (bits >> k) & 1 ? -1 : 1; };
    m.strategies.push_back({1.0 / 16.0, {sign(0), sign(1)}, {sign(2), sign(3)}});
  }
  return m;
}

double lhv_expectation(const LhvModel& m, int a_bit, int b_bit) {
  double e = 0.0;
  for (const auto& st : m.strategies) e += st.weight * st.a_outcomes[a_bit] * st.b_outcomes[b_bit];
  return e;
}

void DetectorModel::validate() const {
  auto prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError(std::string(what) + " must be in [0,1]");
  };
  for (double e : efficiency) prob(e, "efficiency");
  for (double d : dark_rate) prob(d, "dark_rate");
  prob(invalid_rate, "invalid_rate");
  prob(herald_probability, "herald_probability");
  prob(background_fraction, "background_fraction");
  if (!(time_window_ns > 0.0)) throw ArgumentError("time_window_ns must be > 0");
  if (!(time_sigma_ns > 0.0) || !(time_tau_ns > 0.0)) throw ArgumentError("time response widths must be > 0");
  if (!(pulse_spread >= 0.0) || !(phase_spread >= 0.0)) throw ArgumentError("spreads must be >= 0");
  for (int p : pulse_peak) {
    if (p < 0 || p > kMaxPulse) throw ArgumentError("pulse_peak must be in [0,800]");
  }
  for (int c : phase_center) {
    if (c < 0 || c >= kPhaseDomain) throw ArgumentError("phase_center must be in [0,160)");
  }
}

std::string_view to_string(Style s) {
  switch (s) {
    case Style::Delft: return "delft";
    case Style::NIST: return "nist";
    case Style::Vienna: return "vienna";
    case Style::Munich: return "munich";
  }
  return "?";
}

Style parse_style(std::string_view s) {
  if (s == "delft") return Style::Delft;
  if (s == "nist") return Style::NIST;
  if (s == "vienna") return Style::Vienna;
  if (s == "munich") return Style::Munich;
  throw ArgumentError("unknown style '" + std::string(s) + "' (delft, nist, vienna, munich)");
}

namespace {

bool is_spin_style(Style s) { return s == Style::Delft || s == Style::Munich; }

// P(party outcome = +1 | own setting bit) before detection.
std::array<std::array<double, 2>, 2> plus_marginals(const Model& model) {
  if (const auto* lhv = std::get_if<LhvModel>(&model)) {
    std::array<std::array<double, 2>, 2> m{};
    for (const auto& st : lhv->strategies) {
      for (int x = 0; x < 2; ++x) {
        if (st.a_outcomes[x] == 1) m[0][x] += st.weight;
        if (st.b_outcomes[x] == 1) m[1][x] += st.weight;
      }
    }
    return m;
  }
  return {{{0.5, 0.5}, {0.5, 0.5}}};
}

// Everything generate() needs per trial, derived once from the config.
struct Plan {
  Style style;
  const DetectorModel* det;
  const AnomalySpec* anomalies;
  bool quantum;
  StateTag state_tag = StateTag::None;
  // Cumulative (s,t) probabilities per setting, order ++, +-, -+, --.
  std::array<std::array<double, 4>, 4> cumulative{};
  const LhvModel* lhv = nullptr;
  std::vector<double> lhv_cumulative;
  // Per party and own setting: marginal of the quantity the outcome
  // anomaly shifts (plus for spin styles, click for click styles).
  std::array<std::array<double, 2>, 2> shifted_marginal{};
};

Plan make_plan(const SimulationConfig& c) {
  Plan p;
  p.style = c.style;
  p.det = &c.detector;
  p.anomalies = &c.anomalies;
  p.quantum = std::holds_alternative<QuantumModel>(c.model);
  if (p.quantum) {
    const auto& qm = std::get<QuantumModel>(c.model);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        double acc = 0.0;
        int k = 0;
        for (int s : {1, -1}) {
          for (int t : {1, -1}) {
            acc += joint_probability(qm, qm.angle_a[a], qm.angle_b[b], s, t);
            p.cumulative[2 * a + b][k++] = acc;
          }
        }
        p.cumulative[2 * a + b][3] = 1.0;
      }
    }
    const double overlap = std::real(std::conj(qm.alpha) * qm.beta);
    p.state_tag = overlap >= 0.0 ? StateTag::PsiPlus : StateTag::PsiMinus;
  } else {
    p.lhv = &std::get<LhvModel>(c.model);
    double acc = 0.0;
    for (const auto& st : p.lhv->strategies) {
      acc += st.weight;
      p.lhv_cumulative.push_back(acc);
    }
    p.lhv_cumulative.back() = 1.0;
  }
  const auto m = plus_marginals(c.model);
  for (int party = 0; party < 2; ++party) {
    for (int x = 0; x < 2; ++x) {
      if (is_spin_style(c.style)) {
        p.shifted_marginal[party][x] = m[party][x];
      } else {
        p.shifted_marginal[party][x] =
            1.0 - (1.0 - c.detector.efficiency[party] * m[party][x]) * (1.0 - c.detector.dark_rate[party]);
      }
    }
  }
  return p;
}

std::pair<int, int> sample_outcomes(const Plan& p, RandomStream& rs, int a, int b) {
  const double u = rs.uniform();
  if (p.quantum) {
    const auto& cum = p.cumulative[2 * a + b];
    int k = 0;
    while (k < 3 && u >= cum[k]) ++k;
    return {k < 2 ? 1 : -1, k % 2 == 0 ? 1 : -1};
  }
  const auto it = std::upper_bound(p.lhv_cumulative.begin(), p.lhv_cumulative.end(), u);
  const auto idx = std::min<std::size_t>(it - p.lhv_cumulative.begin(), p.lhv_cumulative.size() - 1);
  const auto& st = p.lhv->strategies[idx];
  return {st.a_outcomes[a], st.b_outcomes[b]};
}

// Shifts P(flag) by eps (as an exact additive change, given marginal).
bool shift_flag(bool flag, double eps, double marginal, RandomStream& rs) {
  if (eps > 0.0 && !flag) return rs.bernoulli(eps / (1.0 - marginal));
  if (eps < 0.0 && flag) return !rs.bernoulli(-eps / marginal);
  return flag;
}

double sample_time(const Plan& p, RandomStream& rs, double background) {
  const auto& d = *p.det;
  if (rs.bernoulli(background)) return rs.uniform() * d.time_window_ns;
  if (d.time_response == TimeResponseKind::Gaussian) return d.time_mu_ns + d.time_sigma_ns * rs.normal();
  return d.time_mu_ns - d.time_tau_ns * std::log(1.0 - rs.uniform());
}

DetectionTag signal_tag(const Plan& p, RandomStream& rs, Party party, int b) {
  const auto& d = *p.det;
  const int idx = party == Party::A ? 0 : 1;
  DetectionTag tag;
  tag.party = party;
  if (p.style == Style::NIST) {
    const int pulse = d.pulse_peak[idx] + static_cast<int>(std::floor(std::abs(rs.normal()) * d.pulse_spread));
    tag.pulse = std::min(pulse, kMaxPulse);
    int phase = d.phase_center[idx] + static_cast<int>(std::lround(rs.normal() * d.phase_spread));
    tag.phase = ((phase % kPhaseDomain) + kPhaseDomain) % kPhaseDomain;
  } else {
    double background = d.background_fraction;
    if (party == Party::B && b == 1 && p.anomalies->shape_background_b1) {
      background = *p.anomalies->shape_background_b1;
    }
    tag.time_offset_ns = sample_time(p, rs, background);
  }
  return tag;
}

DetectionTag dark_tag(const Plan& p, RandomStream& rs, Party party) {
  DetectionTag tag;
  tag.party = party;
  if (p.style == Style::NIST) {
    tag.pulse = static_cast<int>(rs.below(kMaxPulse + 1));
    tag.phase = static_cast<int>(rs.below(kPhaseDomain));
  } else {
    tag.time_offset_ns = rs.uniform() * p.det->time_window_ns;
  }
  return tag;
}

TrialRecord generate_trial(const Plan& p, std::uint64_t seed, std::uint64_t trial_id) {
  RandomStream rs(seed, trial_id);
  const auto& det = *p.det;
  const auto& an = *p.anomalies;

  TrialRecord r;
  r.trial_id = static_cast<std::int64_t>(trial_id);
  const int a = rs.bernoulli(0.5) ? 1 : 0;
  const double ub = rs.uniform();
  const int b = an.choice_correlation == 0.0 ? (ub < 0.5 ? 1 : 0)
                                             : (ub < 0.5 * (1.0 + an.choice_correlation) ? a : 1 - a);
  r.choice_a = Choice(a);
  r.choice_b = Choice(b);

  if (is_spin_style(p.style)) {
    const double p_herald = det.herald_probability + (b == 1 ? an.herald_signaling : 0.0);
    if (!rs.bernoulli(p_herald)) {
      r.herald = Outcome::NoClick;
      return r;
    }
    r.herald = Outcome::Click;
    r.state = p.state_tag;
    auto [s, t] = sample_outcomes(p, rs, a, b);
    if (b == 1 && an.outcome_signaling != 0.0) {
      s = shift_flag(s == 1, an.outcome_signaling, p.shifted_marginal[0][a], rs) ? 1 : -1;
    }
    if (rs.bernoulli(det.efficiency[0])) r.outcome_a = s == 1 ? Outcome::Plus : Outcome::Minus;
    if (rs.bernoulli(det.efficiency[1])) r.outcome_b = t == 1 ? Outcome::Plus : Outcome::Minus;
    return r;
  }

  const auto [s, t] = sample_outcomes(p, rs, a, b);
  const std::array<int, 2> spins{s, t};
  const std::array<Party, 2> parties{Party::A, Party::B};
  for (int k = 0; k < 2; ++k) {
    const bool signal = spins[k] == 1 && rs.bernoulli(det.efficiency[k]);
    const bool dark = rs.bernoulli(det.dark_rate[k]);
    bool click = signal || dark;
    bool from_signal = signal;
    if (k == 0 && b == 1 && an.outcome_signaling != 0.0) {
      const bool shifted = shift_flag(click, an.outcome_signaling, p.shifted_marginal[0][a], rs);
      if (shifted && !click) from_signal = true;
      click = shifted;
    }
    Outcome o = click ? Outcome::Click : Outcome::NoClick;
    const bool invalid = rs.bernoulli(det.invalid_rate);
    if (invalid) {
      o = Outcome::Invalid;
      if (!click) from_signal = true;
    }
    (k == 0 ? r.outcome_a : r.outcome_b) = o;
    if (click || invalid) {
      r.tags.push_back(from_signal ? signal_tag(p, rs, parties[k], b) : dark_tag(p, rs, parties[k]));
    }
  }
  return r;
}

}  // namespace

void SimulationConfig::validate() const {
  detector.validate();
  std::visit([](const auto& m) { m.validate(); }, model);
  const auto& an = anomalies;
  if (!(an.choice_correlation >= -1.0 && an.choice_correlation <= 1.0)) {
    throw ArgumentError("choice_correlation must be in [-1,1]");
  }
  if (an.shape_background_b1 && !(*an.shape_background_b1 >= 0.0 && *an.shape_background_b1 <= 1.0)) {
    throw ArgumentError("shape_background_b1 must be in [0,1]");
  }
  if (is_spin_style(style)) {
    const double ph = detector.herald_probability + an.herald_signaling;
    if (!(ph >= 0.0 && ph <= 1.0)) {
      throw ArgumentError("herald signaling pushes p(C=1) outside [0,1]");
    }
  }
  const auto plan = make_plan(*this);
  for (double m : plan.shifted_marginal[0]) {
    const double shifted = m + an.outcome_signaling;
    if (!(shifted >= 0.0 && shifted <= 1.0)) {
      throw ArgumentError("outcome signaling pushes p(A) outside [0,1]");
    }
    if (an.outcome_signaling != 0.0 && (m <= 0.0 || m >= 1.0)) {
      throw ArgumentError("outcome signaling needs a marginal strictly inside (0,1)");
    }
  }
}

unsigned default_thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BELLAUDIT_THREADS")) {
    unsigned cap = 0;
    std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec == std::errc() && cap > 0) return std::min(hw, cap);
  }
  return hw;
}

Dataset generate(const SimulationConfig& config, unsigned threads) {
  config.validate();
  const Plan plan = make_plan(config);
  Dataset d;
  d.meta["style"] = std::string(to_string(config.style));
  d.meta["seed"] = std::to_string(config.seed);
  d.meta["n_trials"] = std::to_string(config.n_trials);
  d.meta["generator"] = "philox4x32-10";
  d.records.resize(config.n_trials);

  if (threads == 0) threads = default_thread_count();
  constexpr std::uint64_t kMinChunk = 1 << 14;
  const std::uint64_t n = config.n_trials;
  const auto workers = static_cast<unsigned>(std::clamp<std::uint64_t>(n / kMinChunk, 1, threads));
  auto fill = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) d.records[i] = generate_trial(plan, config.seed, i);
  };
  if (workers <= 1) {
    fill(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(fill, begin, end);
    }
  }
  return d;
}

double parse_angle(std::string_view s) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    return v;
  };
  s = trim(s);
  auto number = [&](std::string_view v) {
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
      throw ArgumentError("cannot parse angle '" + std::string(s) + "'");
    }
    return x;
  };
  const auto pi_pos = s.find("pi");
  if (pi_pos == std::string_view::npos) return number(s);
  // [-][k*]pi[/n]
  double sign = 1.0;
  std::string_view head = s.substr(0, pi_pos);
  if (!head.empty() && head.front() == '-') {
    sign = -1.0;
    head.remove_prefix(1);
  }
  double k = 1.0;
  if (!head.empty()) {
    if (head.back() != '*') throw ArgumentError("cannot parse angle '" + std::string(s) + "'");
    head.remove_suffix(1);
    k = number(head);
  }
  double den = 1.0;
  std::string_view tail = s.substr(pi_pos + 2);
  if (!tail.empty()) {
    if (tail.front() != '/') throw ArgumentError("cannot parse angle '" + std::string(s) + "'");
    den = number(tail.substr(1));
    if (den == 0.0) throw ArgumentError("angle denominator is zero");
  }
  return sign * k * std::numbers::pi / den;
}

namespace {

double to_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ArgumentError("config key " + std::string(key) + ": not a number: '" + std::string(v) + "'");
  }
  return x;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ArgumentError("config key " + std::string(key) + ": not an unsigned integer: '" + std::string(v) + "'");
  }
  return x;
}

QuantumModel& quantum(SimulationConfig& c) {
  if (!std::holds_alternative<QuantumModel>(c.model)) c.model = QuantumModel{};
  return std::get<QuantumModel>(c.model);
}

// "w:++-+,w:...", signs ordered A(a=0) A(a=1) B(b=0) B(b=1).
LhvModel parse_strategies(std::string_view v) {
  LhvModel m;
  while (!v.empty()) {
    const auto comma = v.find(',');
    std::string_view item = v.substr(0, comma);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos || item.size() - colon - 1 != 4) {
      throw ArgumentError("LHV strategy must look like 0.5:++-+");
    }
    LhvStrategy st;
    st.weight = to_double("lhv_strategies", item.substr(0, colon));
    auto sign = [&](char ch) {
      if (ch == '+') return 1;
      if (ch == '-') return -1;
      throw ArgumentError("LHV strategy signs must be + or -");
    };
    const auto signs = item.substr(colon + 1);
    st.a_outcomes = {sign(signs[0]), sign(signs[1])};
    st.b_outcomes = {sign(signs[2]), sign(signs[3])};
    m.strategies.push_back(st);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return m;
}

}  // namespace

void apply_setting(SimulationConfig& c, std::string_view key, std::string_view v) {
  auto& det = c.detector;
  auto& an = c.anomalies;
  if (key == "style") {
    c.style = parse_style(v);
  } else if (key == "model") {
    if (v == "quantum") {
      quantum(c);
    } else if (v == "lhv") {
      if (!std::holds_alternative<LhvModel>(c.model)) c.model = LhvModel::uniform_mixture();
    } else {
      throw ArgumentError("model must be quantum or lhv");
    }
  } else if (key == "state") {
    auto& q = quantum(c);
    const auto base = v == "psi+" ? QuantumModel::psi_plus() : v == "psi-" ? QuantumModel::psi_minus()
                                                                        : throw ArgumentError("state must be psi+ or psi-");
    q.alpha = base.alpha;
    q.beta = base.beta;
  } else if (key == "alpha") {
    quantum(c).alpha.real(to_double(key, v));
  } else if (key == "alpha_im") {
    quantum(c).alpha.imag(to_double(key, v));
  } else if (key == "beta") {
    quantum(c).beta.real(to_double(key, v));
  } else if (key == "beta_im") {
    quantum(c).beta.imag(to_double(key, v));
  } else if (key == "visibility") {
    quantum(c).visibility = to_double(key, v);
  } else if (key == "angle_a0") {
    quantum(c).angle_a[0] = parse_angle(v);
  } else if (key == "angle_a1") {
    quantum(c).angle_a[1] = parse_angle(v);
  } else if (key == "angle_b0") {
    quantum(c).angle_b[0] = parse_angle(v);
  } else if (key == "angle_b1") {
    quantum(c).angle_b[1] = parse_angle(v);
  } else if (key == "lhv_strategies") {
    c.model = parse_strategies(v);
  } else if (key == "herald_probability") {
    det.herald_probability = to_double(key, v);
  } else if (key == "efficiency_a") {
    det.efficiency[0] = to_double(key, v);
  } else if (key == "efficiency_b") {
    det.efficiency[1] = to_double(key, v);
  } else if (key == "dark_rate_a") {
    det.dark_rate[0] = to_double(key, v);
  } else if (key == "dark_rate_b") {
    det.dark_rate[1] = to_double(key, v);
  } else if (key == "invalid_rate") {
    det.invalid_rate = to_double(key, v);
  } else if (key == "time_response") {
    if (v == "gaussian") {
      det.time_response = TimeResponseKind::Gaussian;
    } else if (v == "exponential") {
      det.time_response = TimeResponseKind::Exponential;
    } else {
      throw ArgumentError("time_response must be gaussian or exponential");
    }
  } else if (key == "time_mu_ns") {
    det.time_mu_ns = to_double(key, v);
  } else if (key == "time_sigma_ns") {
    det.time_sigma_ns = to_double(key, v);
  } else if (key == "time_tau_ns") {
    det.time_tau_ns = to_double(key, v);
  } else if (key == "background_fraction") {
    det.background_fraction = to_double(key, v);
  } else if (key == "time_window_ns") {
    det.time_window_ns = to_double(key, v);
  } else if (key == "pulse_peak_a") {
    det.pulse_peak[0] = static_cast<int>(to_u64(key, v));
  } else if (key == "pulse_peak_b") {
    det.pulse_peak[1] = static_cast<int>(to_u64(key, v));
  } else if (key == "pulse_spread") {
    det.pulse_spread = to_double(key, v);
  } else if (key == "phase_center_a") {
    det.phase_center[0] = static_cast<int>(to_u64(key, v));
  } else if (key == "phase_center_b") {
    det.phase_center[1] = static_cast<int>(to_u64(key, v));
  } else if (key == "phase_spread") {
    det.phase_spread = to_double(key, v);
  } else if (key == "herald_signaling") {
    an.herald_signaling = to_double(key, v);
  } else if (key == "outcome_signaling") {
    an.outcome_signaling = to_double(key, v);
  } else if (key == "shape_background_b1") {
    an.shape_background_b1 = to_double(key, v);
  } else if (key == "choice_correlation") {
    an.choice_correlation = to_double(key, v);
  } else if (key == "n_trials") {
    c.n_trials = to_u64(key, v);
  } else if (key == "seed") {
    c.seed = to_u64(key, v);
  } else {
    throw ArgumentError("unknown simulator setting '" + std::string(key) + "'");
  }
}

SimulationConfig parse_config(std::istream& in, SimulationConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\r' || v.back() == '\t')) v.remove_suffix(1);
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw ArgumentError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    auto key = v.substr(0, eq);
    auto value = v.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
    while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    apply_setting(base, key, value);
  }
  return base;
}

SimulationConfig parse_config_string(std::string_view text, SimulationConfig base) {
  std::istringstream in{std::string(text)};
  return parse_config(in, std::move(base));
}

}  // namespace bellaudit
