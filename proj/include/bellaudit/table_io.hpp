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

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "bellaudit/bell.hpp"
#include "bellaudit/tally.hpp"

namespace bellaudit {

// Count table as a small TSV: `# key=value` meta lines, an optional
// `a<TAB>b<TAB>count` header, then one row per cell. The predicate label
// comes from the `predicate` meta key (default C=1).
struct CountFile {
  CountTable2x2 table;
  std::map<std::string, std::string> meta;
};

CountFile read_counts(std::istream& in);
CountFile read_counts_file(const std::string& path);
void write_counts(const CountFile& f, std::ostream& out);

// Correlation estimates: `label<TAB>E<TAB>sigma[<TAB>ideal]` rows with
// optional header and meta lines.
struct EstimateFile {
  std::vector<std::string> labels;
  std::vector<CorrelationEstimate> estimates;
  std::map<std::string, std::string> meta;
};

EstimateFile read_estimates(std::istream& in);
EstimateFile read_estimates_file(const std::string& path);

}  // namespace bellaudit
