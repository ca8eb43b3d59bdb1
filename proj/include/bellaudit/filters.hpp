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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bellaudit/event_model.hpp"

namespace bellaudit {

enum class WindowMode { Inside, Outside };

// Window on the circular phase domain [0, 160). A tag is Inside when its
// circular distance to `center` is <= halfwidth; ties go to Inside.
struct PhaseWindow {
  int center = 0;
  int halfwidth = 0;
  WindowMode mode = WindowMode::Inside;

  void validate() const;
  bool contains(int phase) const;
  // True when [center - halfwidth, center + halfwidth] wraps past 0 or 160.
  bool crosses_boundary() const;
  friend bool operator==(const PhaseWindow&, const PhaseWindow&) = default;
};

struct PulseRange {
  int lo = 0;
  int hi = kMaxPulse;

  void validate() const;
  bool contains(int pulse) const { return pulse >= lo && pulse <= hi; }
  friend bool operator==(const PulseRange&, const PulseRange&) = default;
};

enum class StateFilter { Any, PsiPlus, PsiMinus };
enum class InvalidPolicy { Drop, CountAsClick };

struct FilterSpec {
  bool herald_required = false;
  std::optional<PulseRange> pulse_a;
  std::optional<PulseRange> pulse_b;
  std::optional<PhaseWindow> phase_a;
  std::optional<PhaseWindow> phase_b;
  StateFilter state = StateFilter::Any;
  // nullopt leaves Invalid outcomes untouched.
  std::optional<InvalidPolicy> invalid_policy;

  void validate() const;
  // Human-readable notes, e.g. windows that wrap around the phase domain.
  std::vector<std::string> notes() const;
};

// Pulse/phase constraints look at the first detection tag of the
// constrained party; a record with no such tag (or no such field) fails.
Dataset apply_filter(const Dataset& d, const FilterSpec& f);

// Circular distance on a domain of `domain` phase indices.
int circular_distance(int a, int b, int domain = kPhaseDomain);

// Rescale factor domain / (domain - excluded) for an Outside window
// (excluded width 2*halfwidth); for Inside, domain / (2*halfwidth).
struct Rational {
  long long num = 1;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
Rational window_area_fraction(const PhaseWindow& w, int domain = kPhaseDomain);

// CLI syntax helpers: "inside:90:16", "28:800", "psi+".
PhaseWindow parse_phase_window(std::string_view s);
PulseRange parse_pulse_range(std::string_view s);
StateFilter parse_state_filter(std::string_view s);

}  // namespace bellaudit
