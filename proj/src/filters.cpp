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

#include "bellaudit/filters.hpp"

#include <charconv>
#include <cstdlib>
#include <numeric>

#include "bellaudit/errors.hpp"

namespace bellaudit {

void PhaseWindow::validate() const {
  if (center < 0 || center >= kPhaseDomain) {
    throw ArgumentError("phase window center out of [0,160): " + std::to_string(center));
  }
  if (halfwidth < 0) throw ArgumentError("phase window halfwidth must be >= 0");
}

bool PhaseWindow::contains(int phase) const {
  const bool inside = circular_distance(phase, center) <= halfwidth;
  return mode == WindowMode::Inside ? inside : !inside;
}

bool PhaseWindow::crosses_boundary() const {
  return center - halfwidth < 0 || center + halfwidth >= kPhaseDomain;
}

void PulseRange::validate() const {
  if (lo < 0 || lo > hi || hi > kMaxPulse) {
    throw ArgumentError("pulse range must satisfy 0 <= lo <= hi <= 800");
  }
}

void FilterSpec::validate() const {
  if (pulse_a) pulse_a->validate();
  if (pulse_b) pulse_b->validate();
  if (phase_a) phase_a->validate();
  if (phase_b) phase_b->validate();
}

std::vector<std::string> FilterSpec::notes() const {
  std::vector<std::string> out;
  auto check = [&](const std::optional<PhaseWindow>& w, const char* party) {
    if (w && w->crosses_boundary()) {
      out.push_back(std::string("phase window for party ") + party +
                    " wraps around the 160-index phase domain (circular interpretation)");
    }
  };
  check(phase_a, "A");
  check(phase_b, "B");
  return out;
}

int circular_distance(int a, int b, int domain) {
  int d = std::abs(a - b) % domain;
  return std::min(d, domain - d);
}

namespace {

bool tag_passes(const TrialRecord& r, Party party, const std::optional<PulseRange>& pulse,
                const std::optional<PhaseWindow>& phase) {
  if (!pulse && !phase) return true;
  const DetectionTag* tag = r.first_tag(party);
  if (!tag) return false;
  if (pulse && (!tag->pulse || !pulse->contains(*tag->pulse))) return false;
  if (phase && (!tag->phase || !phase->contains(*tag->phase))) return false;
  return true;
}

void apply_invalid_policy(std::optional<Outcome>& o, InvalidPolicy policy) {
  if (o != Outcome::Invalid) return;
  if (policy == InvalidPolicy::CountAsClick) {
    o = Outcome::Click;
  } else {
    o.reset();
  }
}

}  // namespace

Dataset apply_filter(const Dataset& d, const FilterSpec& f) {
  f.validate();
  Dataset out;
  out.meta = d.meta;
  for (const auto& r : d.records) {
    if (f.herald_required && r.herald != Outcome::Click) continue;
    if (f.state == StateFilter::PsiPlus && r.state != StateTag::PsiPlus) continue;
    if (f.state == StateFilter::PsiMinus && r.state != StateTag::PsiMinus) continue;
    if (!tag_passes(r, Party::A, f.pulse_a, f.phase_a)) continue;
    if (!tag_passes(r, Party::B, f.pulse_b, f.phase_b)) continue;
    TrialRecord kept = r;
    if (f.invalid_policy) {
      apply_invalid_policy(kept.outcome_a, *f.invalid_policy);
      apply_invalid_policy(kept.outcome_b, *f.invalid_policy);
    }
    out.records.push_back(std::move(kept));
  }
  return out;
}

Rational window_area_fraction(const PhaseWindow& w, int domain) {
  if (domain <= 0) throw ArgumentError("phase domain must be positive");
  if (w.halfwidth < 0) throw ArgumentError("phase window halfwidth must be >= 0");
  const long long width = 2LL * w.halfwidth;
  long long covered = 0;
  if (w.mode == WindowMode::Outside) {
    if (width >= domain) {
      throw ArgumentError("excluded window width " + std::to_string(width) +
                          " leaves nothing of the phase domain");
    }
    covered = domain - width;
  } else {
    if (width == 0 || width > domain) {
      throw ArgumentError("inside window must cover a width in (0, domain]");
    }
    covered = width;
  }
  const long long g = std::gcd(static_cast<long long>(domain), covered);
  return Rational{domain / g, covered / g};
}

namespace {

int parse_int_field(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ArgumentError("invalid integer for " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

PhaseWindow parse_phase_window(std::string_view s) {
  auto p1 = s.find(':');
  auto p2 = p1 == std::string_view::npos ? p1 : s.find(':', p1 + 1);
  if (p2 == std::string_view::npos) {
    throw ArgumentError("phase window must look like inside:90:16 or outside:90:16");
  }
  PhaseWindow w;
  auto mode = s.substr(0, p1);
  if (mode == "inside") {
    w.mode = WindowMode::Inside;
  } else if (mode == "outside") {
    w.mode = WindowMode::Outside;
  } else {
    throw ArgumentError("phase window mode must be inside or outside");
  }
  w.center = parse_int_field(s.substr(p1 + 1, p2 - p1 - 1), "window center");
  w.halfwidth = parse_int_field(s.substr(p2 + 1), "window halfwidth");
  w.validate();
  return w;
}

PulseRange parse_pulse_range(std::string_view s) {
  auto p = s.find(':');
  if (p == std::string_view::npos) throw ArgumentError("pulse range must look like 28:800");
  PulseRange r{parse_int_field(s.substr(0, p), "pulse lo"), parse_int_field(s.substr(p + 1), "pulse hi")};
  r.validate();
  return r;
}

StateFilter parse_state_filter(std::string_view s) {
  if (s == "psi+") return StateFilter::PsiPlus;
  if (s == "psi-") return StateFilter::PsiMinus;
  if (s == "any") return StateFilter::Any;
  throw ArgumentError("state must be psi+, psi- or any");
}

}  // namespace bellaudit
