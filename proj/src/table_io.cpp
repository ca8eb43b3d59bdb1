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

#include "bellaudit/table_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "bellaudit/errors.hpp"

namespace bellaudit {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto tab = line.find('\t');
    out.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, int line_no, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("line " + std::to_string(line_no) + ": bad " + what + " '" + std::string(s) + "'");
  }
  return v;
}

// Returns false for lines that carry no row (blank, meta, header).
bool preamble(std::string& line, int line_no, std::map<std::string, std::string>& meta,
              std::string_view header_first) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.empty()) return false;
  if (line[0] == '#') {
    const auto body = std::string_view(line).substr(1);
    const auto eq = body.find('=');
    if (eq != std::string_view::npos) {
      auto key = body.substr(0, eq);
      while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
      meta[std::string(key)] = std::string(body.substr(eq + 1));
    }
    return false;
  }
  if (line.rfind(header_first, 0) == 0 && line.size() > header_first.size() && line[header_first.size()] == '\t') {
    return false;
  }
  (void)line_no;
  return true;
}

}  // namespace

CountFile read_counts(std::istream& in) {
  CountFile f;
  std::array<bool, 4> seen{};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!preamble(line, line_no, f.meta, "a")) continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 3) throw DataError("line " + std::to_string(line_no) + ": expected a, b, count");
    const int a = parse_number<int>(cols[0], line_no, "choice a");
    const int b = parse_number<int>(cols[1], line_no, "choice b");
    if ((a != 0 && a != 1) || (b != 0 && b != 1)) {
      throw DataError("line " + std::to_string(line_no) + ": choices must be 0 or 1");
    }
    if (seen[2 * a + b]) throw DataError("line " + std::to_string(line_no) + ": duplicate cell");
    seen[2 * a + b] = true;
    f.table.n[a][b] = parse_number<std::uint64_t>(cols[2], line_no, "count");
  }
  for (bool s : seen) {
    if (!s) throw DataError("count table needs all four (a, b) cells");
  }
  if (auto it = f.meta.find("predicate"); it != f.meta.end()) {
    f.table.predicate_label = std::string(label(parse_predicate(it->second)));
  }
  return f;
}

CountFile read_counts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return read_counts(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_counts(const CountFile& f, std::ostream& out) {
  auto meta = f.meta;
  meta["predicate"] = f.table.predicate_label;
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
  out << "a\tb\tcount\n";
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) out << a << '\t' << b << '\t' << f.table.n[a][b] << '\n';
  }
}

EstimateFile read_estimates(std::istream& in) {
  EstimateFile f;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!preamble(line, line_no, f.meta, "label")) continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 3 && cols.size() != 4) {
      throw DataError("line " + std::to_string(line_no) + ": expected label, E, sigma[, ideal]");
    }
    CorrelationEstimate e;
    e.E = parse_number<double>(cols[1], line_no, "E");
    e.sigma = parse_number<double>(cols[2], line_no, "sigma");
    if (*e.sigma < 0.0) throw DataError("line " + std::to_string(line_no) + ": negative sigma");
    if (cols.size() == 4) e.ideal_magnitude = parse_number<double>(cols[3], line_no, "ideal");
    f.labels.emplace_back(cols[0]);
    f.estimates.push_back(e);
  }
  return f;
}

EstimateFile read_estimates_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return read_estimates(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace bellaudit
