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

#include "bellaudit/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "bellaudit/errors.hpp"

#ifndef BELLAUDIT_VERSION
#define BELLAUDIT_VERSION "0.0.0"
#endif

namespace bellaudit {

namespace {

struct Sha256 {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  Sha256() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256 init failed");
  }
  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx.get(), data, n) != 1) throw IoError("sha256 update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) throw IoError("sha256 final failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 15];
    }
    return out;
  }
};

double number_or_nan(const nlohmann::json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

std::string format_p(double p) {
  std::ostringstream os;
  os << std::setprecision(3) << p;
  return os.str();
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    long long v = 0;
    std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(std::vector<std::string> command_line) {
  RunManifest m;
  m.command_line = std::move(command_line);
  m.version = BELLAUDIT_VERSION;
  m.timestamp = utc_timestamp();
  return m;
}

nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["experiment"] = r.experiment;
  j["category"] = std::string(to_string(r.category));
  j["statistic"] = r.statistic;
  j["raw_p"] = r.p.raw;
  j["factor"] = r.p.correction_factor;
  j["corrected_p"] = r.p.corrected;
  j["inputs"] = r.inputs;
  j["notes"] = r.notes;
  return j;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& d : m.inputs) inputs.push_back({{"path", d.path}, {"sha256", d.sha256}});
  return {{"command_line", m.command_line},
          {"inputs", inputs},
          {"seeds", m.seeds},
          {"version", m.version},
          {"timestamp", m.timestamp}};
}

TestReport report_from_json(const nlohmann::json& j) {
  try {
    TestReport r;
    r.name = j.at("name").get<std::string>();
    r.experiment = j.value("experiment", std::string{});
    if (j.contains("category")) {
      const auto c = parse_category(j.at("category").get<std::string>());
      if (!c) throw DataError("report '" + r.name + "': unknown category");
      r.category = *c;
    }
    r.statistic = number_or_nan(j.at("statistic"));
    r.p.raw = j.at("raw_p").get<double>();
    r.p.correction_factor = j.at("factor").get<double>();
    r.p.corrected = j.at("corrected_p").get<double>();
    if (j.contains("inputs")) {
      for (const auto& [k, v] : j.at("inputs").items()) r.inputs[k] = number_or_nan(v);
    }
    if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string determinism_hash(const nlohmann::json& document) {
  nlohmann::json copy = document;
  copy.erase("determinism_hash");
  if (copy.contains("manifest")) copy["manifest"].erase("timestamp");
  return sha256_hex(copy.dump());
}

nlohmann::json make_document(const RunManifest& m, std::span<const TestReport> reports) {
  nlohmann::json doc;
  doc["manifest"] = to_json(m);
  doc["reports"] = nlohmann::json::array();
  for (const auto& r : reports) doc["reports"].push_back(to_json(r));
  doc["determinism_hash"] = determinism_hash(doc);
  return doc;
}

std::string signaling_verdict(double p, const VerdictThresholds& th) {
  if (p < th.significant) return "significant";
  if (p < th.moderate) return "moderate";
  return "insignificant";
}

std::string model_verdict(double p, const VerdictThresholds& th) {
  return p < th.model ? "insufficient" : "sufficient";
}

TestReport margin_report(const std::string& experiment, double margin_ns, const std::string& note) {
  TestReport r;
  r.name = "margin";
  r.experiment = experiment;
  r.category = TestCategory::Other;
  r.statistic = margin_ns;
  r.inputs["margin_ns"] = margin_ns;
  if (!note.empty()) r.notes.push_back(note);
  return r;
}

Summary report_bundle(std::span<const TestReport> reports, const VerdictThresholds& th) {
  Summary s;
  s.thresholds = th;
  std::set<std::pair<std::string, std::string>> seen;
  std::map<std::string, std::size_t> row_of;
  for (const auto& r : reports) {
    if (!seen.emplace(r.experiment, r.name).second) {
      throw ArgumentError("duplicate report name '" + r.name + "' in experiment '" + r.experiment + "'");
    }
    auto [it, fresh] = row_of.emplace(r.experiment, s.rows.size());
    if (fresh) s.rows.push_back(SummaryRow{r.experiment, {}, {}, {}, std::nullopt});
    auto& row = s.rows[it->second];

    auto consider = [&](SummaryCell& cell, std::string verdict) {
      if (!cell.corrected_p || r.p.corrected < *cell.corrected_p) {
        cell.corrected_p = r.p.corrected;
        cell.verdict = std::move(verdict);
        cell.source = r.name;
      }
    };
    switch (r.category) {
      case TestCategory::Signaling: consider(row.signaling, signaling_verdict(r.p.corrected, th)); break;
      case TestCategory::Independence: consider(row.independence, signaling_verdict(r.p.corrected, th)); break;
      case TestCategory::Model: consider(row.model, model_verdict(r.p.corrected, th)); break;
      case TestCategory::Other:
        if (r.name == "margin") row.margin_ns = r.statistic;
        break;
    }
  }
  return s;
}

nlohmann::json to_json(const Summary& s) {
  auto cell = [](const SummaryCell& c) {
    nlohmann::json j{{"verdict", c.verdict}};
    if (c.corrected_p) {
      j["corrected_p"] = *c.corrected_p;
      j["source"] = c.source;
    }
    return j;
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows) {
    nlohmann::json j{{"experiment", r.experiment},
                     {"signaling", cell(r.signaling)},
                     {"independence", cell(r.independence)},
                     {"simple_model", cell(r.model)}};
    j["margin_ns"] = r.margin_ns ? nlohmann::json(*r.margin_ns) : nlohmann::json(nullptr);
    rows.push_back(std::move(j));
  }
  return {{"rows", rows},
          {"thresholds",
           {{"moderate", s.thresholds.moderate},
            {"significant", s.thresholds.significant},
            {"model", s.thresholds.model}}}};
}

std::string render_text(const Summary& s) {
  std::ostringstream os;
  if (s.rows.empty()) {
    os << "(no reports)\n";
  } else {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> head{""};
    std::vector<std::string> sig{"signaling"}, ind{"independence"}, mod{"simple model"}, mar{"margin[ns]"};
    auto cell = [](const SummaryCell& c) {
      return c.corrected_p ? c.verdict + " (" + format_p(*c.corrected_p) + ")" : c.verdict;
    };
    for (const auto& r : s.rows) {
      head.push_back(r.experiment.empty() ? "-" : r.experiment);
      sig.push_back(cell(r.signaling));
      ind.push_back(cell(r.independence));
      mod.push_back(cell(r.model));
      mar.push_back(r.margin_ns ? format_p(*r.margin_ns) : "-");
    }
    grid = {head, sig, ind, mod, mar};
    std::vector<std::size_t> width(head.size(), 0);
    for (const auto& line : grid) {
      for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    }
    for (const auto& line : grid) {
      for (std::size_t i = 0; i < line.size(); ++i) {
        if (i + 1 < line.size()) {
          os << std::left << std::setw(static_cast<int>(width[i])) << line[i] << " | ";
        } else {
          os << line[i] << '\n';
        }
      }
    }
  }
  os << "thresholds: significant < " << s.thresholds.significant << ", moderate < " << s.thresholds.moderate
     << ", model insufficient < " << s.thresholds.model << " (corrected P)\n";
  return os.str();
}

std::string render_text(std::span<const TestReport> reports) {
  std::ostringstream os;
  for (const auto& r : reports) {
    if (!r.experiment.empty()) os << r.experiment << ": ";
    os << r.name << "  statistic=" << std::setprecision(6) << r.statistic << "  raw_p=" << format_p(r.p.raw)
       << "  factor=" << std::setprecision(6) << r.p.correction_factor << "  corrected_p=" << format_p(r.p.corrected)
       << "\n";
    for (const auto& n : r.notes) os << "    " << n << "\n";
  }
  return os.str();
}

}  // namespace bellaudit
