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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bellaudit {

// A setting bit chosen by one party.
class Choice {
 public:
  constexpr Choice() = default;
  // Throws ArgumentError unless bit is 0 or 1.
  explicit Choice(int bit);

  constexpr int value() const { return bit_; }
  friend constexpr bool operator==(Choice, Choice) = default;

 private:
  int bit_ = 0;
};

// Plus/Minus for spin readout (Delft, Munich), Click/NoClick for photon
// detection (NIST, Vienna).
enum class Outcome : std::uint8_t { Plus, Minus, Click, NoClick, Invalid };

enum class Party : std::uint8_t { A, B, C };

enum class StateTag : std::uint8_t { None, PsiPlus, PsiMinus };

inline constexpr int kMaxPulse = 800;
inline constexpr int kPhaseDomain = 160;

struct DetectionTag {
  Party party = Party::A;
  std::optional<int> pulse;       // [0, 800]
  std::optional<int> phase;       // [0, 160)
  std::optional<double> time_offset_ns;

  // Throws ArgumentError when an index is out of range or every field is absent.
  void validate() const;
  friend bool operator==(const DetectionTag&, const DetectionTag&) = default;
};

struct TrialRecord {
  std::int64_t trial_id = 0;
  std::optional<Choice> choice_a;
  std::optional<Choice> choice_b;
  std::optional<Outcome> outcome_a;
  std::optional<Outcome> outcome_b;
  std::optional<Outcome> herald;  // Click/NoClick only
  StateTag state = StateTag::None;
  std::vector<DetectionTag> tags;

  // First tag belonging to `party`, or nullptr.
  const DetectionTag* first_tag(Party party) const;
  std::optional<Outcome> outcome(Party party) const;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct Dataset {
  std::vector<TrialRecord> records;
  std::map<std::string, std::string> meta;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct IngestResult {
  Dataset dataset;
  std::size_t skipped = 0;
  // 1-based line numbers of the first few skipped lines, for diagnostics.
  std::vector<std::size_t> skipped_lines;
};

// Parses the tab-separated record format. Malformed lines (bad field,
// wrong field count, duplicate trial_id) are skipped and counted.
IngestResult ingest(std::istream& in);
IngestResult ingest_file(const std::string& path);

// Parses a single record line. Returns nullopt if malformed.
std::optional<TrialRecord> parse_record(std::string_view line);

// Writes meta as `# key=value` lines (sorted) followed by one line per record.
void emit(const Dataset& d, std::ostream& out);
void emit_file(const Dataset& d, const std::string& path);
std::string format_record(const TrialRecord& r);

std::string_view to_string(Outcome o);
std::string_view to_string(Party p);
std::string_view to_string(StateTag s);
std::optional<Outcome> parse_outcome(std::string_view s);
std::optional<Party> parse_party(std::string_view s);
std::optional<StateTag> parse_state(std::string_view s);

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact

// distance/c - elapsed, in ns. Positive means spacelike with that margin.
double spacelike_margin(double distance_m, double elapsed_ns);

}  // namespace bellaudit
