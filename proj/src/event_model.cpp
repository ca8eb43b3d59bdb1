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

#include "bellaudit/event_model.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "bellaudit/errors.hpp"

namespace bellaudit {

Choice::Choice(int bit) : bit_(bit) {
  if (bit != 0 && bit != 1) {
    throw ArgumentError("choice must be 0 or 1, got " + std::to_string(bit));
  }
}

void DetectionTag::validate() const {
  if (pulse && (*pulse < 0 || *pulse > kMaxPulse)) {
    throw ArgumentError("pulse index out of [0,800]: " + std::to_string(*pulse));
  }
  if (phase && (*phase < 0 || *phase >= kPhaseDomain)) {
    throw ArgumentError("phase index out of [0,160): " + std::to_string(*phase));
  }
  if (time_offset_ns && !std::isfinite(*time_offset_ns)) {
    throw ArgumentError("time offset must be finite");
  }
  if (!pulse && !phase && !time_offset_ns) {
    throw ArgumentError("detection tag carries no pulse, phase or time");
  }
}

const DetectionTag* TrialRecord::first_tag(Party party) const {
  for (const auto& t : tags) {
    if (t.party == party) return &t;
  }
  return nullptr;
}

std::optional<Outcome> TrialRecord::outcome(Party party) const {
  switch (party) {
    case Party::A: return outcome_a;
    case Party::B: return outcome_b;
    case Party::C: return herald;
  }
  return std::nullopt;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Plus: return "+1";
    case Outcome::Minus: return "-1";
    case Outcome::Click: return "1";
    case Outcome::NoClick: return "0";
    case Outcome::Invalid: return "inv";
  }
  return "?";
}

std::string_view to_string(Party p) {
  switch (p) {
    case Party::A: return "A";
    case Party::B: return "B";
    case Party::C: return "C";
  }
  return "?";
}

std::string_view to_string(StateTag s) {
  switch (s) {
    case StateTag::PsiPlus: return "psi+";
    case StateTag::PsiMinus: return "psi-";
    case StateTag::None: return "-";
  }
  return "?";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  if (s == "+1") return Outcome::Plus;
  if (s == "-1") return Outcome::Minus;
  if (s == "1") return Outcome::Click;
  if (s == "0") return Outcome::NoClick;
  if (s == "inv") return Outcome::Invalid;
  return std::nullopt;
}

std::optional<Party> parse_party(std::string_view s) {
  if (s == "A") return Party::A;
  if (s == "B") return Party::B;
  if (s == "C") return Party::C;
  return std::nullopt;
}

std::optional<StateTag> parse_state(std::string_view s) {
  if (s == "psi+") return StateTag::PsiPlus;
  if (s == "psi-") return StateTag::PsiMinus;
  if (s == "-") return StateTag::None;
  return std::nullopt;
}

namespace {

constexpr std::string_view kAbsent = "-";

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

// Splits on `sep` into at most N pieces; returns the count found.
template <std::size_t N>
std::size_t split(std::string_view s, char sep, std::array<std::string_view, N>& parts) {
  std::size_t count = 0;
  while (true) {
    auto pos = s.find(sep);
    if (count == N) return N + 1;
    parts[count++] = s.substr(0, pos);
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return count;
}

std::optional<std::optional<Choice>> parse_choice_field(std::string_view s) {
  if (s == kAbsent) return std::optional<Choice>{};
  if (s == "0") return std::optional<Choice>{Choice(0)};
  if (s == "1") return std::optional<Choice>{Choice(1)};
  return std::nullopt;
}

std::optional<std::optional<Outcome>> parse_outcome_field(std::string_view s) {
  if (s == kAbsent) return std::optional<Outcome>{};
  if (auto o = parse_outcome(s)) return std::optional<Outcome>{*o};
  return std::nullopt;
}

std::optional<DetectionTag> parse_tag(std::string_view s) {
  std::array<std::string_view, 4> f;
  if (split(s, ':', f) != 4) return std::nullopt;
  DetectionTag tag;
  auto party = parse_party(f[0]);
  if (!party) return std::nullopt;
  tag.party = *party;
  if (f[1] != kAbsent) {
    int v;
    if (!parse_int(f[1], v) || v < 0 || v > kMaxPulse) return std::nullopt;
    tag.pulse = v;
  }
  if (f[2] != kAbsent) {
    int v;
    if (!parse_int(f[2], v) || v < 0 || v >= kPhaseDomain) return std::nullopt;
    tag.phase = v;
  }
  if (f[3] != kAbsent) {
    double v;
    if (!parse_double(f[3], v)) return std::nullopt;
    tag.time_offset_ns = v;
  }
  if (!tag.pulse && !tag.phase && !tag.time_offset_ns) return std::nullopt;
  return tag;
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

std::optional<TrialRecord> parse_record(std::string_view line) {
  std::array<std::string_view, 8> f;
  if (split(line, '\t', f) != 8) return std::nullopt;

  TrialRecord r;
  if (!parse_int(f[0], r.trial_id)) return std::nullopt;

  auto a = parse_choice_field(f[1]);
  auto b = parse_choice_field(f[2]);
  auto oa = parse_outcome_field(f[3]);
  auto ob = parse_outcome_field(f[4]);
  if (!a || !b || !oa || !ob) return std::nullopt;
  r.choice_a = *a;
  r.choice_b = *b;
  r.outcome_a = *oa;
  r.outcome_b = *ob;

  if (f[5] == "1") {
    r.herald = Outcome::Click;
  } else if (f[5] == "0") {
    r.herald = Outcome::NoClick;
  } else if (f[5] != kAbsent) {
    return std::nullopt;
  }

  auto state = parse_state(f[6]);
  if (!state) return std::nullopt;
  r.state = *state;

  std::string_view tags = f[7];
  if (tags != kAbsent) {
    while (true) {
      auto pos = tags.find(';');
      auto tag = parse_tag(tags.substr(0, pos));
      if (!tag) return std::nullopt;
      r.tags.push_back(*tag);
      if (pos == std::string_view::npos) break;
      tags.remove_prefix(pos + 1);
    }
  }
  return r;
}

IngestResult ingest(std::istream& in) {
  if (!in) throw IoError("unreadable record source");
  IngestResult result;
  std::unordered_set<std::int64_t> seen;
  std::string buf;
  std::size_t line_no = 0;
  auto skip = [&] {
    ++result.skipped;
    if (result.skipped_lines.size() < 16) result.skipped_lines.push_back(line_no);
  };
  while (std::getline(in, buf)) {
    ++line_no;
    std::string_view line = strip_cr(buf);
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      auto eq = body.find('=');
      if (eq != std::string_view::npos && eq > 0) {
        result.dataset.meta[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
      }
      continue;
    }
    auto rec = parse_record(line);
    if (!rec || !seen.insert(rec->trial_id).second) {
      skip();
      continue;
    }
    result.dataset.records.push_back(std::move(*rec));
  }
  if (in.bad()) throw IoError("read error on record source");
  return result;
}

IngestResult ingest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return ingest(in);
}

std::string format_record(const TrialRecord& r) {
  std::string out;
  out.reserve(64);
  out += std::to_string(r.trial_id);
  out += '\t';
  out += r.choice_a ? (r.choice_a->value() ? "1" : "0") : "-";
  out += '\t';
  out += r.choice_b ? (r.choice_b->value() ? "1" : "0") : "-";
  out += '\t';
  out += r.outcome_a ? to_string(*r.outcome_a) : kAbsent;
  out += '\t';
  out += r.outcome_b ? to_string(*r.outcome_b) : kAbsent;
  out += '\t';
  if (!r.herald) {
    out += '-';
  } else {
    out += *r.herald == Outcome::Click ? '1' : '0';
  }
  out += '\t';
  out += to_string(r.state);
  out += '\t';
  if (r.tags.empty()) {
    out += '-';
  } else {
    for (std::size_t i = 0; i < r.tags.size(); ++i) {
      const auto& t = r.tags[i];
      if (i) out += ';';
      out += to_string(t.party);
      out += ':';
      out += t.pulse ? std::to_string(*t.pulse) : "-";
      out += ':';
      out += t.phase ? std::to_string(*t.phase) : "-";
      out += ':';
      if (t.time_offset_ns) {
        append_double(out, *t.time_offset_ns);
      } else {
        out += '-';
      }
    }
  }
  return out;
}

void emit(const Dataset& d, std::ostream& out) {
  for (const auto& [k, v] : d.meta) out << "# " << k << '=' << v << '\n';
  std::string line;
  for (const auto& r : d.records) {
    line = format_record(r);
    line += '\n';
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!out) throw IoError("write error on record sink");
}

void emit_file(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  emit(d, out);
  out.flush();
  if (!out) throw IoError("write error on " + path);
}

double spacelike_margin(double distance_m, double elapsed_ns) {
  if (!(distance_m >= 0.0) || !(elapsed_ns >= 0.0)) {
    throw ArgumentError("spacelike_margin: distance and elapsed time must be non-negative");
  }
  return distance_m / kSpeedOfLight * 1e9 - elapsed_ns;
}

}  // namespace bellaudit
