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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bellaudit/stats.hpp"

namespace bellaudit {

struct InputDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::vector<std::string> command_line;
  std::vector<InputDigest> inputs;
  std::vector<std::uint64_t> seeds;
  std::string version;
  std::string timestamp;  // ISO 8601 UTC
};

std::string sha256_hex(std::string_view bytes);
// Throws IoError when the file cannot be read.
std::string sha256_file(const std::string& path);

// Honours SOURCE_DATE_EPOCH so that builds of a report can be pinned.
std::string utc_timestamp();

RunManifest make_manifest(std::vector<std::string> command_line);

nlohmann::json to_json(const TestReport& r);
nlohmann::json to_json(const RunManifest& m);
TestReport report_from_json(const nlohmann::json& j);

// {"manifest", "reports", "determinism_hash"}. The hash covers everything
// except the manifest timestamp.
nlohmann::json make_document(const RunManifest& m, std::span<const TestReport> reports);
std::string determinism_hash(const nlohmann::json& document);

struct VerdictThresholds {
  double moderate = 0.1;        // corrected P below this: "moderate"
  double significant = 5.7e-7;  // five standard deviations, two-sided
  double model = 0.01;          // Model reports below this: "insufficient"
};

// "significant", "moderate" or "insignificant".
std::string signaling_verdict(double corrected_p, const VerdictThresholds& th);
// "insufficient" or "sufficient".
std::string model_verdict(double corrected_p, const VerdictThresholds& th);

// A margin between the remote choice becoming reachable and readout, in ns.
// Carried as a report so the summary can pick it up.
TestReport margin_report(const std::string& experiment, double margin_ns, const std::string& note = {});

struct SummaryCell {
  std::string verdict = "untested";
  std::optional<double> corrected_p;
  std::string source;  // name of the deciding report
};

struct SummaryRow {
  std::string experiment;
  SummaryCell signaling;
  SummaryCell independence;
  SummaryCell model;
  std::optional<double> margin_ns;
};

struct Summary {
  std::vector<SummaryRow> rows;  // ordered by first appearance
  VerdictThresholds thresholds;
};

// Groups reports by experiment. Each cell is decided by the smallest
// corrected P among that category's reports. Throws ArgumentError when two
// reports share (experiment, name).
Summary report_bundle(std::span<const TestReport> reports, const VerdictThresholds& th = {});

nlohmann::json to_json(const Summary& s);
// Aligned table: one column per experiment, rows signaling / independence /
// simple model / margin, followed by the thresholds.
std::string render_text(const Summary& s);
// One line per report.
std::string render_text(std::span<const TestReport> reports);

}  // namespace bellaudit
