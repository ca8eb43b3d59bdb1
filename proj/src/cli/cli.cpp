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

#include "bellaudit/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bellaudit/bell.hpp"
#include "bellaudit/errors.hpp"
#include "bellaudit/event_model.hpp"
#include "bellaudit/filters.hpp"
#include "bellaudit/histogram.hpp"
#include "bellaudit/report.hpp"
#include "bellaudit/simulator.hpp"
#include "bellaudit/stats.hpp"
#include "bellaudit/table_io.hpp"
#include "bellaudit/tally.hpp"

#ifndef BELLAUDIT_PRESET_DIR
#define BELLAUDIT_PRESET_DIR "presets"
#endif

namespace bellaudit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string find_preset(const std::string& name) {
  if (name.find('/') != std::string::npos || name.ends_with(".conf")) {
    if (!fs::exists(name)) throw ArgumentError("preset file not found: " + name);
    return name;
  }
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("BELLAUDIT_PRESET_DIR")) dirs.emplace_back(env);
  dirs.emplace_back(BELLAUDIT_PRESET_DIR);
  for (const auto& d : dirs) {
    const auto p = d / (name + ".conf");
    if (fs::exists(p)) return p.string();
  }
  throw ArgumentError("unknown preset '" + name + "'");
}

namespace {

struct FilterArgs {
  bool herald = false;
  std::string pulse_a, pulse_b, phase_a, phase_b;
  std::string state = "any";
  std::string invalid;

  void attach(CLI::App* app) {
    app->add_flag("--herald", herald, "keep only records with C=1");
    app->add_option("--pulse-a", pulse_a, "pulse range for A, e.g. 28:800");
    app->add_option("--pulse-b", pulse_b, "pulse range for B, e.g. 37:800");
    app->add_option("--phase-a", phase_a, "phase window for A, e.g. outside:90:16");
    app->add_option("--phase-b", phase_b, "phase window for B, e.g. outside:125:20");
    app->add_option("--state", state, "psi+, psi- or any");
    app->add_option("--invalid", invalid, "invalid outcomes: drop or click");
  }

  FilterSpec spec() const {
    FilterSpec f;
    f.herald_required = herald;
    if (!pulse_a.empty()) f.pulse_a = parse_pulse_range(pulse_a);
    if (!pulse_b.empty()) f.pulse_b = parse_pulse_range(pulse_b);
    if (!phase_a.empty()) f.phase_a = parse_phase_window(phase_a);
    if (!phase_b.empty()) f.phase_b = parse_phase_window(phase_b);
    f.state = parse_state_filter(state);
    if (invalid == "drop") {
      f.invalid_policy = InvalidPolicy::Drop;
    } else if (invalid == "click") {
      f.invalid_policy = InvalidPolicy::CountAsClick;
    } else if (!invalid.empty()) {
      throw ArgumentError("--invalid must be drop or click");
    }
    f.validate();
    return f;
  }

  bool active() const {
    return herald || !pulse_a.empty() || !pulse_b.empty() || !phase_a.empty() || !phase_b.empty() ||
           state != "any" || !invalid.empty();
  }
};

// Shared per-invocation state: where output goes, what went in.
class Context {
 public:
  Context(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
      : manifest_(make_manifest(args)), out_(out), err_(err) {}

  std::ostream& err() { return err_; }
  RunManifest& manifest() { return manifest_; }

  Dataset load(const std::string& path) {
    auto res = ingest_file(path);
    manifest_.inputs.push_back({path, sha256_file(path)});
    if (res.skipped > 0) {
      err_ << path << ": skipped " << res.skipped << " malformed line(s)";
      for (auto l : res.skipped_lines) err_ << ' ' << l;
      err_ << '\n';
    }
    if (auto it = res.dataset.meta.find("seed"); it != res.dataset.meta.end()) {
      manifest_.seeds.push_back(std::stoull(it->second));
    }
    return std::move(res.dataset);
  }

  void digest(const std::string& path) { manifest_.inputs.push_back({path, sha256_file(path)}); }

  void write(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
      out_ << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) throw IoError("cannot write " + path);
  }

  void write_reports(const std::vector<TestReport>& reports, const std::string& format, const std::string& path) {
    if (format == "text") {
      write(render_text(reports), path);
    } else {
      write(make_document(manifest_, reports).dump(2) + "\n", path);
    }
  }

 private:
  RunManifest manifest_;
  std::ostream& out_;
  std::ostream& err_;
};

std::string prefixed(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "/" + name;
}

PairSelector parse_pair(const std::string& s) {
  if (s == "a0") return PairSelector::AFixedA0;
  if (s == "a1") return PairSelector::AFixedA1;
  if (s == "b0") return PairSelector::BFixedB0;
  if (s == "b1") return PairSelector::BFixedB1;
  throw ArgumentError("--pair must be a0, a1, b0 or b1");
}

std::pair<int, int> parse_cell(const std::string& s) {
  if (s.size() != 2 || (s[0] != '0' && s[0] != '1') || (s[1] != '0' && s[1] != '1')) {
    throw ArgumentError("choice pair must look like 01 (a then b)");
  }
  return {s[0] - '0', s[1] - '0'};
}

Party parse_ab_party(const std::string& s) {
  const auto p = parse_party(s);
  if (!p || *p == Party::C) throw ArgumentError("--party must be A or B");
  return *p;
}

std::pair<std::string, double> parse_named_factor(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ArgumentError("--factor must look like name=value");
  double v = 0.0;
  try {
    v = std::stod(s.substr(eq + 1));
  } catch (const std::exception&) {
    throw ArgumentError("--factor value is not a number: " + s);
  }
  return {s.substr(0, eq), v};
}

// One table to test, with where it came from.
struct TableInput {
  CountTable2x2 table;
  std::string label;
  std::string experiment;
  std::optional<PhaseWindow> window;  // phase window behind the counts
  std::optional<double> reference_independence_p;
};

struct TableSource {
  std::string data;
  std::vector<std::string> predicates;
  std::vector<std::string> counts;
  FilterArgs filter;

  void attach(CLI::App* app) {
    app->add_option("data", data, "record file (TSV)");
    app->add_option("--predicate", predicates, "C=1, A=1, B=1, A=-1, ... (repeatable)");
    app->add_option("--counts", counts, "count-table file (repeatable), instead of a record file");
    filter.attach(app);
  }

  std::vector<TableInput> load(Context& ctx) const {
    std::vector<TableInput> out;
    if (!counts.empty()) {
      if (!data.empty()) throw ArgumentError("give either a record file or --counts, not both");
      for (const auto& path : counts) {
        auto f = read_counts_file(path);
        ctx.digest(path);
        TableInput in;
        in.table = f.table;
        in.label = f.meta.count("name") ? f.meta.at("name") : fs::path(path).stem().string();
        if (f.meta.count("experiment")) in.experiment = f.meta.at("experiment");
        if (f.meta.count("phase_window")) in.window = parse_phase_window(f.meta.at("phase_window"));
        if (f.meta.count("reference_independence_p")) {
          in.reference_independence_p = std::stod(f.meta.at("reference_independence_p"));
        }
        out.push_back(std::move(in));
      }
      return out;
    }
    if (data.empty()) throw ArgumentError("a record file or --counts is required");
    Dataset d = ctx.load(data);
    const auto spec = filter.spec();
    for (const auto& n : spec.notes()) ctx.err() << "note: " << n << '\n';
    if (filter.active()) d = apply_filter(d, spec);
    const auto preds = predicates.empty() ? std::vector<std::string>{"C=1"} : predicates;
    for (const auto& ps : preds) {
      const auto p = parse_predicate(ps);
      auto tally = build_table(d, p);
      if (tally.unattributed) {
        ctx.err() << "note: " << tally.unattributed << " matching record(s) lack a choice and were not counted\n";
      }
      TableInput in;
      in.table = tally.table;
      in.label = preds.size() > 1 ? std::string(label(p)) : std::string();
      if (d.meta.count("style")) in.experiment = d.meta.at("style");
      const Party party = predicate_party(p);
      if (party == Party::A) in.window = spec.phase_a;
      if (party == Party::B) in.window = spec.phase_b;
      out.push_back(std::move(in));
    }
    return out;
  }
};

json table_json(const CountTable2x2& t, std::uint64_t unattributed) {
  json j;
  j["predicate"] = t.predicate_label;
  j["counts"] = {{"00", t.n[0][0]}, {"01", t.n[0][1]}, {"10", t.n[1][0]}, {"11", t.n[1][1]}};
  if (t.total_trials) {
    const auto& tt = *t.total_trials;
    j["trials"] = {{"00", tt[0]}, {"01", tt[1]}, {"10", tt[2]}, {"11", tt[3]}};
  }
  j["unattributed"] = unattributed;
  return j;
}

void require_format(const std::string& f, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (f == a) return;
  }
  throw ArgumentError("unsupported --format '" + f + "'");
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"bellaudit: audits Bell-test datasets for no-signaling, choice independence and model consistency",
               "bellaudit"};
  app.set_version_flag("--version", BELLAUDIT_VERSION);
  app.require_subcommand(1);

  std::string format;
  std::string output;
  auto add_io = [&](CLI::App* sub, std::string default_format) {
    sub->add_option("--format", format, "output format")->default_str(default_format);
    sub->add_option("-o,--output", output, "output file (default stdout)");
    sub->parse_complete_callback([&format, default_format] {
      if (format.empty()) format = default_format;
    });
  };

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  std::string sim_style, sim_preset, sim_config;
  std::vector<std::string> sim_sets;
  std::optional<std::uint64_t> sim_n, sim_seed;
  unsigned sim_threads = 0;
  sim->add_option("--style", sim_style, "delft, nist, vienna or munich");
  sim->add_option("--preset", sim_preset, "named preset or path to a .conf file");
  sim->add_option("--config", sim_config, "key=value config file applied after the preset");
  sim->add_option("--set", sim_sets, "override one key=value (repeatable)");
  sim->add_option("--n", sim_n, "number of trials");
  sim->add_option("--seed", sim_seed, "seed");
  sim->add_option("--threads", sim_threads, "worker threads (default BELLAUDIT_THREADS or all cores)");
  sim->add_option("-o,--output", output, "output file (default stdout)");

  // filter
  auto* filt = app.add_subcommand("filter", "apply herald, pulse, phase and state filters");
  std::string filt_in;
  FilterArgs filt_args;
  filt->add_option("data", filt_in, "record file")->required();
  filt_args.attach(filt);
  filt->add_option("-o,--output", output, "output file (default stdout)");

  // tally
  auto* tal = app.add_subcommand("tally", "choice-conditioned 2x2 count table");
  std::string tal_in, tal_pred = "C=1";
  bool tal_transpose = false;
  FilterArgs tal_filter;
  tal->add_option("data", tal_in, "record file")->required();
  tal->add_option("--predicate", tal_pred, "C=1, A=1, B=1, A=+1, A=-1, B=+1, B=-1");
  tal->add_flag("--transpose", tal_transpose, "rows a, columns b");
  tal_filter.attach(tal);
  add_io(tal, "text");

  // test
  auto* test = app.add_subcommand("test", "hypothesis tests");
  test->require_subcommand(1);

  auto* ns = test->add_subcommand("nosignal", "no-signaling pair tests with look-elsewhere factors");
  TableSource ns_src;
  std::string ns_method = "exact", ns_experiment;
  double ns_lee = 4.0;
  std::vector<std::string> ns_factors, ns_pairs;
  bool ns_rescale = false;
  ns_src.attach(ns);
  ns->add_option("--method", ns_method, "exact or gauss");
  ns->add_option("--lee", ns_lee, "look-elsewhere factor (default 4)");
  ns->add_option("--factor", ns_factors, "extra factor name=value (repeatable)");
  ns->add_option("--pair", ns_pairs, "a0, a1, b0, b1 (repeatable; default: all for the predicate)");
  ns->add_flag("--window-rescale", ns_rescale, "multiply by the phase-window area factor");
  ns->add_option("--experiment", ns_experiment, "experiment label for the summary");
  add_io(ns, "json");

  auto* ind = test->add_subcommand("independence", "choice-independence products and Pearson chi-squared");
  TableSource ind_src;
  std::optional<double> ind_ref;
  std::string ind_experiment;
  ind_src.attach(ind);
  ind->add_option("--reference-p", ind_ref, "reference P-value to quote next to the computed one");
  ind->add_option("--experiment", ind_experiment, "experiment label");
  add_io(ind, "json");

  auto* vis = test->add_subcommand("visibility", "common-visibility consistency of correlation estimates");
  std::string vis_in, vis_est, vis_experiment;
  std::optional<double> vis_ideal;
  vis->add_option("data", vis_in, "record file with Plus/Minus outcomes");
  vis->add_option("--estimates", vis_est, "estimates file (label, E, sigma[, ideal])");
  vis->add_option("--ideal", vis_ideal, "ideal |E| for every estimate");
  vis->add_option("--experiment", vis_experiment, "experiment label");
  add_io(vis, "json");

  auto* shp = test->add_subcommand("shape", "single-scale shape test of two time-tag histograms");
  std::string shp_in, shp_party = "B", shp_bins = "250x4ns", shp_first = "00", shp_second = "01", shp_region,
                      shp_experiment;
  double shp_origin = 0.0;
  int shp_min = kDefaultMinCount;
  shp->add_option("data", shp_in, "record file with time tags")->required();
  shp->add_option("--party", shp_party, "A or B");
  shp->add_option("--bins", shp_bins, "count x width, e.g. 250x4ns");
  shp->add_option("--origin", shp_origin, "first bin start in ns");
  shp->add_option("--first", shp_first, "choice pair ab of the first histogram");
  shp->add_option("--second", shp_second, "choice pair ab of the second histogram");
  shp->add_option("--min-count", shp_min, "pool bins until h1 + h2 reaches this");
  shp->add_option("--region", shp_region, "bin range first:last for the normalized ratio");
  shp->add_option("--experiment", shp_experiment, "experiment label");
  add_io(shp, "json");

  auto* mar = test->add_subcommand("margin", "spacelike margin from distance and elapsed time");
  double mar_distance = 0.0, mar_elapsed = 0.0;
  std::string mar_experiment;
  mar->add_option("--distance-m", mar_distance, "separation in metres")->required();
  mar->add_option("--elapsed-ns", mar_elapsed, "choice-to-readout time in ns")->required();
  mar->add_option("--experiment", mar_experiment, "experiment label");
  add_io(mar, "json");

  // hist
  auto* hist = app.add_subcommand("hist", "time-tag histograms or pulse x phase grids");
  std::string hist_in, hist_party = "A", hist_bins = "250x4ns";
  double hist_origin = 0.0;
  bool hist_grid = false;
  hist->add_option("data", hist_in, "record file")->required();
  hist->add_option("--party", hist_party, "A or B");
  hist->add_option("--bins", hist_bins, "count x width, e.g. 250x4ns");
  hist->add_option("--origin", hist_origin, "first bin start in ns");
  hist->add_flag("--grid", hist_grid, "pulse x phase grid (50 x 20) instead of time bins");
  add_io(hist, "csv");

  // bell
  auto* bell = app.add_subcommand("bell", "correlations and CHSH");
  std::string bell_in, bell_signs;
  bell->add_option("data", bell_in, "record file with Plus/Minus outcomes")->required();
  bell->add_option("--signs", bell_signs, "CHSH signs for terms 00 01 10 11, e.g. +++-")->required();
  add_io(bell, "text");

  // report
  auto* rep = app.add_subcommand("report", "summary table over report documents");
  std::vector<std::string> rep_in, rep_margin;
  std::string rep_margins;
  VerdictThresholds th;
  rep->add_option("reports", rep_in, "report JSON documents");
  rep->add_option("--margin", rep_margin, "experiment=ns (repeatable)");
  rep->add_option("--margins", rep_margins, "TSV of experiment, margin_ns[, note]");
  rep->add_option("--moderate", th.moderate, "corrected P below this is moderate");
  rep->add_option("--significant", th.significant, "corrected P below this is significant");
  rep->add_option("--model", th.model, "Model-test corrected P below this is insufficient");
  add_io(rep, "text");

  if (args.size() <= 1) {
    err << app.help();
    return kExitUsage;
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    for (auto* s : app.get_subcommands()) {
      for (auto* s2 : s->get_subcommands()) out << s2->help();
    }
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << BELLAUDIT_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Context ctx(args, out, err);
  try {
    if (sim->parsed()) {
      SimulationConfig cfg;
      if (!sim_style.empty()) cfg.style = parse_style(sim_style);
      for (const auto& path : {sim_preset.empty() ? std::string() : find_preset(sim_preset), sim_config}) {
        if (path.empty()) continue;
        std::ifstream f(path);
        if (!f) throw IoError("cannot open " + path);
        cfg = parse_config(f, cfg);
      }
      for (const auto& kv : sim_sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ArgumentError("--set must look like key=value");
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!sim_style.empty()) cfg.style = parse_style(sim_style);
      if (sim_n) cfg.n_trials = *sim_n;
      if (sim_seed) cfg.seed = *sim_seed;
      Dataset d = generate(cfg, sim_threads);
      if (!sim_preset.empty()) d.meta["preset"] = fs::path(sim_preset).stem().string();
      std::ostringstream os;
      emit(d, os);
      ctx.write(os.str(), output);
      return kExitOk;
    }

    if (filt->parsed()) {
      const auto spec = filt_args.spec();
      for (const auto& n : spec.notes()) err << "note: " << n << '\n';
      const Dataset d = apply_filter(ctx.load(filt_in), spec);
      std::ostringstream os;
      emit(d, os);
      ctx.write(os.str(), output);
      return kExitOk;
    }

    if (tal->parsed()) {
      require_format(format, {"text", "json", "csv", "counts"});
      Dataset d = ctx.load(tal_in);
      const auto spec = tal_filter.spec();
      for (const auto& n : spec.notes()) err << "note: " << n << '\n';
      if (tal_filter.active()) d = apply_filter(d, spec);
      const auto res = build_table(d, parse_predicate(tal_pred));
      std::string text;
      if (format == "text") {
        text = render_text(res.table, tal_transpose);
        if (res.unattributed) text += "unattributed: " + std::to_string(res.unattributed) + "\n";
      } else if (format == "json") {
        json j = table_json(res.table, res.unattributed);
        j["manifest"] = to_json(ctx.manifest());
        text = j.dump(2) + "\n";
      } else if (format == "csv") {
        text = "a,b,count\n";
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            text += std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(res.table.n[a][b]) + "\n";
          }
        }
      } else {
        std::ostringstream os;
        CountFile f{res.table, {}};
        if (d.meta.count("style")) f.meta["experiment"] = d.meta.at("style");
        write_counts(f, os);
        text = os.str();
      }
      ctx.write(text, output);
      return kExitOk;
    }

    if (ns->parsed()) {
      require_format(format, {"json", "text"});
      NosignalOptions opts;
      if (ns_method == "exact") {
        opts.method = PairTest::ExactBinomial;
      } else if (ns_method == "gauss") {
        opts.method = PairTest::Gaussian;
      } else {
        throw ArgumentError("--method must be exact or gauss");
      }
      opts.lee_factor = ns_lee;
      for (const auto& p : ns_pairs) opts.pairs.push_back(parse_pair(p));
      std::vector<TestReport> reports, pair_reports;
      const auto tables = ns_src.load(ctx);
      for (const auto& in : tables) {
        auto o = opts;
        o.experiment = ns_experiment.empty() ? in.experiment : ns_experiment;
        if (ns_rescale) {
          if (!in.window) throw ArgumentError("--window-rescale needs a phase window for the predicate's party");
          const auto r = window_area_fraction(*in.window);
          o.extra_factors.emplace_back(
              "phase window rescale " + std::to_string(r.num) + "/" + std::to_string(r.den), r.value());
        }
        for (const auto& f : ns_factors) o.extra_factors.push_back(parse_named_factor(f));
        for (auto& r : nosignal_suite(in.table, o)) {
          r.name = prefixed(in.label, r.name);
          if (r.inputs.count("n") && r.name.find(" min") == std::string::npos) pair_reports.push_back(r);
          reports.push_back(std::move(r));
        }
      }
      if (tables.size() > 1 && !pair_reports.empty()) {
        auto s = summarize_min(pair_reports, "nosignal min");
        s.experiment = ns_experiment.empty() ? tables.front().experiment : ns_experiment;
        reports.push_back(std::move(s));
      }
      ctx.write_reports(reports, format, output);
      return kExitOk;
    }

    if (ind->parsed()) {
      require_format(format, {"json", "text"});
      std::vector<TestReport> reports;
      for (const auto& in : ind_src.load(ctx)) {
        const auto ref = ind_ref ? ind_ref : in.reference_independence_p;
        auto r = independence_report(in.table, ref, ind_experiment.empty() ? in.experiment : ind_experiment);
        r.name = prefixed(in.label, r.name);
        reports.push_back(std::move(r));
      }
      ctx.write_reports(reports, format, output);
      return kExitOk;
    }

    if (vis->parsed()) {
      require_format(format, {"json", "text"});
      std::vector<CorrelationEstimate> est;
      std::string experiment = vis_experiment;
      if (!vis_est.empty()) {
        if (!vis_in.empty()) throw ArgumentError("give either a record file or --estimates, not both");
        auto f = read_estimates_file(vis_est);
        ctx.digest(vis_est);
        est = f.estimates;
        if (experiment.empty() && f.meta.count("experiment")) experiment = f.meta.at("experiment");
      } else {
        if (vis_in.empty()) throw ArgumentError("a record file or --estimates is required");
        const Dataset d = ctx.load(vis_in);
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) est.push_back(estimate_correlation(d, a, b));
        }
        if (experiment.empty() && d.meta.count("style")) experiment = d.meta.at("style");
      }
      if (vis_ideal) {
        for (auto& e : est) e.ideal_magnitude = *vis_ideal;
      }
      std::vector<TestReport> reports{visibility_consistency(est, experiment)};
      ctx.write_reports(reports, format, output);
      return kExitOk;
    }

    if (shp->parsed()) {
      require_format(format, {"json", "text"});
      const Dataset d = ctx.load(shp_in);
      const Party party = parse_ab_party(shp_party);
      const auto bins = parse_bin_spec(shp_bins, shp_origin);
      const auto set = bin_time_tags(d, party, bins.width, bins.count, bins.origin);
      const auto c1 = parse_cell(shp_first), c2 = parse_cell(shp_second);
      if (!set.by_choice.count(c1) || !set.by_choice.count(c2)) throw DataError("no clicks for a requested choice pair");
      const auto& h1 = set.by_choice.at(c1);
      const auto& h2 = set.by_choice.at(c2);
      std::optional<BinRegion> region;
      if (!shp_region.empty()) {
        const auto colon = shp_region.find(':');
        if (colon == std::string::npos) throw ArgumentError("--region must look like first:last");
        region = BinRegion{std::stoi(shp_region.substr(0, colon)), std::stoi(shp_region.substr(colon + 1))};
      }
      const auto res = shape_consistency(h1, h2, shp_min);
      const double ratio = max_normalized_ratio(h1, h2, region);
      const std::string pname(to_string(party));
      TestReport r;
      r.name = "shape[" + pname + shp_first + " vs " + pname + shp_second + "]";
      r.category = TestCategory::Model;
      r.experiment = shp_experiment.empty() && d.meta.count("style") ? d.meta.at("style") : shp_experiment;
      r.statistic = res.chi2;
      r.p = PValue::from_raw(res.raw_p);
      r.inputs = {{"scale", res.scale},
                  {"dof", static_cast<double>(res.dof)},
                  {"usable_bins", static_cast<double>(res.usable_bins)},
                  {"input_bins", static_cast<double>(res.input_bins)},
                  {"max_ratio_deviation", res.max_ratio_deviation},
                  {"total_first", static_cast<double>(h1.total())},
                  {"total_second", static_cast<double>(h2.total())},
                  {"max_normalized_ratio_percent", ratio}};
      r.notes.push_back("chi-squared of h1 = s * h2 with one fitted scale, Poisson errors on both histograms");
      r.notes.push_back(std::string("normalized ratio: ") + kRatioDefinition);
      if (set.below_range || set.above_range) {
        r.notes.push_back(std::to_string(set.below_range + set.above_range) + " click(s) outside the binned range");
      }
      ctx.write_reports({r}, format, output);
      return kExitOk;
    }

    if (mar->parsed()) {
      require_format(format, {"json", "text"});
      const double m = spacelike_margin(mar_distance, mar_elapsed);
      auto r = margin_report(mar_experiment, m,
                             "distance " + fmt(mar_distance) + " m at c minus " + fmt(mar_elapsed) + " ns");
      r.inputs["distance_m"] = mar_distance;
      r.inputs["elapsed_ns"] = mar_elapsed;
      ctx.write_reports({r}, format, output);
      return kExitOk;
    }

    if (hist->parsed()) {
      require_format(format, {"csv", "json"});
      const Dataset d = ctx.load(hist_in);
      const Party party = parse_ab_party(hist_party);
      json j;
      std::string csv;
      if (hist_grid) {
        const auto g = bin_grid(d, party);
        for (const auto& n : g.notes) err << "note: " << n << '\n';
        for (const auto& [ab, grid] : g.by_choice) {
          const auto body = to_csv(grid);
          const auto nl = body.find('\n');
          if (csv.empty()) csv = "a,b," + body.substr(0, nl + 1);
          std::istringstream rows(body.substr(nl + 1));
          std::string line;
          while (std::getline(rows, line)) {
            csv += std::to_string(ab.first) + "," + std::to_string(ab.second) + "," + line + "\n";
          }
          json cells = json::array();
          for (const auto& row : grid.counts) cells.push_back(row);
          j["grids"].push_back({{"a", ab.first}, {"b", ab.second}, {"counts", cells}});
        }
        j["tags_used"] = g.tags_used;
      } else {
        const auto bins = parse_bin_spec(hist_bins, hist_origin);
        const auto set = bin_time_tags(d, party, bins.width, bins.count, bins.origin);
        csv = "a,b,bin_start,count,sigma\n";
        for (const auto& [ab, h] : set.by_choice) {
          const auto body = to_csv(h);
          std::istringstream rows(body.substr(body.find('\n') + 1));
          std::string line;
          while (std::getline(rows, line)) {
            csv += std::to_string(ab.first) + "," + std::to_string(ab.second) + "," + line + "\n";
          }
          j["histograms"].push_back({{"a", ab.first},
                                     {"b", ab.second},
                                     {"origin_ns", h.bins.origin},
                                     {"width_ns", h.bins.width},
                                     {"counts", h.counts}});
        }
        j["below_range"] = set.below_range;
        j["above_range"] = set.above_range;
        j["unattributed"] = set.unattributed;
      }
      j["party"] = std::string(to_string(party));
      j["manifest"] = to_json(ctx.manifest());
      ctx.write(format == "csv" ? csv : j.dump(2) + "\n", output);
      return kExitOk;
    }

    if (bell->parsed()) {
      require_format(format, {"text", "json"});
      const Dataset d = ctx.load(bell_in);
      const auto res = chsh(d, parse_signs(bell_signs));
      if (format == "json") {
        json terms = json::array();
        for (const auto& t : res.terms) {
          terms.push_back({{"a", t.bits->first}, {"b", t.bits->second}, {"E", t.E}, {"sigma", *t.sigma}, {"n", t.n}});
        }
        json j{{"S", res.S},
               {"sigma", res.sigma_S},
               {"signs", format_signs(res.signs)},
               {"terms", terms},
               {"bounds", {{"classical", res.classical_bound}, {"quantum", res.quantum_bound}}},
               {"manifest", to_json(ctx.manifest())}};
        ctx.write(j.dump(2) + "\n", output);
      } else {
        std::ostringstream os;
        os << "ab  E          sigma      n\n";
        for (const auto& t : res.terms) {
          os << t.bits->first << t.bits->second << "  " << std::left << std::setw(10) << fmt(t.E) << ' '
             << std::setw(10) << fmt(*t.sigma) << ' ' << t.n << '\n';
        }
        os << "S = " << fmt(res.S) << " +- " << fmt(res.sigma_S) << " (signs " << format_signs(res.signs)
           << "; local bound 2, quantum bound " << fmt(res.quantum_bound) << ")\n";
        ctx.write(os.str(), output);
      }
      return kExitOk;
    }

    if (rep->parsed()) {
      require_format(format, {"text", "json"});
      std::vector<TestReport> reports;
      for (const auto& path : rep_in) {
        std::ifstream f(path);
        if (!f) throw IoError("cannot open " + path);
        json doc;
        try {
          doc = json::parse(f);
        } catch (const json::exception& e) {
          throw DataError(path + ": " + e.what());
        }
        ctx.digest(path);
        const auto& list = doc.contains("reports") ? doc.at("reports") : doc;
        if (!list.is_array()) throw DataError(path + ": expected a report document or an array of reports");
        for (const auto& r : list) reports.push_back(report_from_json(r));
        if (doc.contains("manifest")) {
          for (const auto& s : doc["manifest"].value("seeds", json::array())) {
            ctx.manifest().seeds.push_back(s.get<std::uint64_t>());
          }
        }
      }
      if (!rep_margins.empty()) {
        std::ifstream f(rep_margins);
        if (!f) throw IoError("cannot open " + rep_margins);
        ctx.digest(rep_margins);
        std::string line;
        while (std::getline(f, line)) {
          if (line.empty() || line[0] == '#' || line.rfind("experiment\t", 0) == 0) continue;
          std::istringstream ls(line);
          std::string exp, ns_text, note;
          std::getline(ls, exp, '\t');
          std::getline(ls, ns_text, '\t');
          std::getline(ls, note);
          try {
            reports.push_back(margin_report(exp, std::stod(ns_text), note));
          } catch (const std::invalid_argument&) {
            throw DataError(rep_margins + ": bad margin '" + ns_text + "'");
          }
        }
      }
      for (const auto& m : rep_margin) {
        const auto [exp, v] = parse_named_factor(m);
        reports.push_back(margin_report(exp, v));
      }
      const auto summary = report_bundle(reports, th);
      if (format == "text") {
        ctx.write(render_text(summary), output);
      } else {
        json doc = make_document(ctx.manifest(), reports);
        doc.erase("determinism_hash");
        doc["summary"] = to_json(summary);
        doc["determinism_hash"] = determinism_hash(doc);
        ctx.write(doc.dump(2) + "\n", output);
      }
      return kExitOk;
    }
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitDataError;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace bellaudit::cli
