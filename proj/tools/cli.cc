// Copyright 2026 The ebfsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "ebf/bmc.h"
#include "ebf/corpus.h"
#include "ebf/gbf.h"
#include "ebf/witness.h"

namespace ebf::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDefaultSweepExecs = 20000;

struct Flags {
  std::string budget = "15s";
  bool budget_given = false;
  std::optional<double> bmc_frac;
  std::optional<double> fuzz_frac;
  int max_threads = 5;
  std::uint64_t delay_max = 100;
  double exit_prob = 0.0001;
  int k = 200;
  int C = 12;
  std::string input_domain = "-1,0,1";
  std::optional<std::uint64_t> execs;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string out;
  bool json = false;
  std::string corpus;
  std::string detectors;

  std::string program;
  std::string witness;
  bool canonical = false;
  std::string axis;
  std::vector<std::string> values;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--budget", f.budget,
                  "Wall-time budget, e.g. 60s, 500ms, 2m")
      ->capture_default_str();
  app->add_option("--bmc-frac", f.bmc_frac, "BMC share of the budget");
  app->add_option("--fuzz-frac", f.fuzz_frac, "Fuzzer share of the budget");
  app->add_option("--max-threads", f.max_threads, "Active-thread threshold")
      ->capture_default_str();
  app->add_option("--delay-max", f.delay_max, "Upper bound of injected delays")
      ->capture_default_str();
  app->add_option("--exit-prob", f.exit_prob,
                  "Per-instruction early-exit probability")
      ->capture_default_str();
  app->add_option("-k", f.k, "BMC step bound")->capture_default_str();
  app->add_option("-C", f.C, "BMC context-switch bound")->capture_default_str();
  app->add_option("--input-domain", f.input_domain,
                  "Comma-separated BMC nondet values")
      ->capture_default_str();
  app->add_option("--execs", f.execs, "Fuzzer execution budget");
  app->add_option("--jobs", f.jobs, "Fuzzer worker threads")
      ->capture_default_str();
  app->add_option("--seed", f.seed, "Master seed")
      ->envname("EBF_SEED")
      ->capture_default_str();
  app->add_option("--out", f.out, "Directory for witnesses and crash seeds");
  app->add_flag("--json", f.json, "Print the machine-readable record");
  app->add_option("--corpus", f.corpus, "Directory of initial fuzzer seeds");
  app->add_option("--detectors", f.detectors,
                  "race,deadlock,thread_leak,memory,assertion | all | none");
}

std::chrono::milliseconds budget_of(const Flags& f) {
  auto d = parse_duration(f.budget);
  if (!d) throw UsageError("invalid duration '" + f.budget + "'");
  return *d;
}

std::vector<Value> parse_domain(const std::string& text) {
  std::vector<Value> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    Value v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError("invalid --input-domain value '" + std::string(item) +
                       "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) throw UsageError("--input-domain must not be empty");
  return out;
}

ExecConfig exec_config(const Flags& f) {
  ExecConfig c;
  c.thread_threshold = f.max_threads;
  c.delay_max = f.delay_max;
  c.exit_prob = f.exit_prob;
  if (!f.detectors.empty()) {
    auto set = DetectorSet::parse(f.detectors);
    if (!set) throw UsageError("invalid --detectors '" + f.detectors + "'");
    c.detectors = *set;
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

BmcConfig bmc_config(const Flags& f) {
  BmcConfig c;
  c.k = f.k;
  c.C = f.C;
  c.input_domain = parse_domain(f.input_domain);
  if (!f.detectors.empty()) c.detectors = exec_config(f).detectors;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

EnsembleConfig ensemble_config(const Flags& f) {
  EnsembleConfig c;
  c.total_budget = budget_of(f);
  if (f.bmc_frac && f.fuzz_frac) {
    c.bmc_frac = *f.bmc_frac;
    c.fuzz_frac = *f.fuzz_frac;
  } else if (f.bmc_frac) {
    c.bmc_frac = *f.bmc_frac;
    c.fuzz_frac = std::min(c.fuzz_frac, 1.0 - c.bmc_frac);
  } else if (f.fuzz_frac) {
    c.fuzz_frac = *f.fuzz_frac;
    c.bmc_frac = std::min(c.bmc_frac, 1.0 - c.fuzz_frac);
  }
  c.overhead_frac = 1.0 - c.bmc_frac - c.fuzz_frac;
  if (c.overhead_frac < 0 && c.overhead_frac > -1e-9) c.overhead_frac = 0;
  c.exec = exec_config(f);
  c.bmc = bmc_config(f);
  c.fuzz_max_execs = f.execs;
  c.jobs = f.jobs;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

Program load(const std::string& path, std::ostream& err) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    throw UsageError("");
  }
  try {
    return parse_program(text);
  } catch (const ParseError& e) {
    // Compiler-style "file:line:column: message".
    for (const auto& d : e.diagnostics()) {
      err << path << ":" << d.line;
      if (d.column > 0) err << ":" << d.column;
      err << ": " << d.message << "\n";
    }
    throw UsageError("");
  }
}

fs::path out_dir(const Flags& f) {
  fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
  fs::create_directories(dir);
  return dir;
}

std::string write_witness(const fs::path& dir, CrashReport report,
                          const std::string& run_id) {
  report.run_id = run_id;
  const fs::path path = dir / ("witness_" + run_id + ".txt");
  std::ofstream(path) << serialize(report);
  return path.string();
}

std::string describe(const Finding& f) {
  return std::string(to_string(f.kind)) + " at " + f.location.str();
}

std::string describe(const EngineVerdict& v) {
  std::ostringstream s;
  s << to_string(v.verdict);
  if (!v.findings.empty()) s << " (" << describe(v.findings.front()) << ")";
  if (!v.note.empty()) s << " [" << v.note << "]";
  return s.str();
}

int cmd_parse(const Flags& f, std::ostream& out, std::ostream& err) {
  const Program p = load(f.program, err);
  if (f.canonical) {
    out << to_text(p);
    return kExitSafe;
  }
  std::size_t instructions = 0;
  for (const auto& t : p.threads) instructions += t.body.size();
  out << f.program << ": ok, " << p.threads.size() << " thread kinds, "
      << p.shared.size() << " shared, " << p.mutexes.size() << " mutexes, "
      << instructions << " instructions, fingerprint " << fingerprint_hex(p)
      << "\n";
  return kExitSafe;
}

int cmd_check(const Flags& f, std::ostream& out, std::ostream& err) {
  const Program p = load(f.program, err);
  const EnsembleConfig config = ensemble_config(f);
  const FinalVerdict v = run_ebf(p, config, f.seed);

  std::string witness_path;
  const fs::path dir = out_dir(f);
  if (v.witness) {
    witness_path = write_witness(dir, *v.witness,
                                 v.witness_engine + "-" + std::to_string(f.seed));
  }
  const std::string record = to_json(v, config, f.program, witness_path);
  std::ofstream(dir / (fs::path(f.program).stem().string() + ".ebf.json"))
      << record << "\n";

  if (f.json) {
    out << record << "\n";
  } else {
    out << "program: " << f.program << "\n"
        << "outcome: " << to_string(v.outcome) << "\n"
        << "bmc: " << describe(v.bmc) << ", " << v.bmc.work << " states, "
        << std::fixed << std::setprecision(2) << v.bmc_seconds << "s\n"
        << "gbf: " << describe(v.gbf) << ", " << v.gbf.work << " executions, "
        << v.fuzz_seconds << "s\n";
    if (!witness_path.empty()) out << "witness: " << witness_path << "\n";
    out << "seed: " << f.seed << "\n";
  }
  return exit_code(v.outcome);
}

std::vector<FuzzSeed> initial_corpus(const Flags& f, const Program& p) {
  std::vector<FuzzSeed> seeds;
  if (!f.corpus.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(f.corpus)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      const std::string bytes = read_file(path);
      seeds.push_back(FuzzSeed{{bytes.begin(), bytes.end()}});
    }
    if (seeds.empty()) throw UsageError("seed corpus " + f.corpus + " is empty");
    return seeds;
  }
  EnsembleConfig defaults;
  SplitMix64 rng(f.seed);
  return make_seeds(EngineVerdict{}, defaults, p.nondet_sites(), rng);
}

int cmd_fuzz(const Flags& f, std::ostream& out, std::ostream& err) {
  const Program p = load(f.program, err);
  FuzzOptions options;
  options.exec = exec_config(f);
  options.budget.max_execs = f.execs;
  if (!f.execs || f.budget_given) options.budget.max_time = budget_of(f);
  options.master_seed = f.seed;
  options.jobs = f.jobs;
  const FuzzResult r = fuzz(p, initial_corpus(f, p), options);

  std::map<BugKind, std::size_t> per_kind;
  for (const auto& c : r.crashes) {
    for (BugKind k : kAllBugKinds) {
      if (c.outcome.found(k)) ++per_kind[k];
    }
  }
  if (f.json) {
    out << "{\"executions\": " << r.executions
        << ", \"crashes\": " << r.crashes.size() << ", \"per_kind\": {";
    bool first = true;
    for (const auto& [k, n] : per_kind) {
      out << (first ? "" : ", ") << "\"" << to_string(k) << "\": " << n;
      first = false;
    }
    out << "}, \"seed\": " << f.seed << "}\n";
  } else {
    out << "executions: " << r.executions << "\n"
        << "queue: " << r.queue.size() << ", coverage edges: "
        << r.coverage.size() << "\n"
        << "crashes: " << r.crashes.size() << "\n";
    for (const auto& [k, n] : per_kind) {
      out << "  " << to_string(k) << ": " << n << "\n";
    }
    const auto bugs = r.distinct_bugs();
    if (!bugs.empty()) out << "distinct bugs:\n";
    for (const auto& b : bugs) out << "  " << describe(b) << "\n";
    out << "seed: " << f.seed << "\n";
  }
  if (!f.out.empty()) {
    const fs::path dir = out_dir(f);
    for (const auto& c : r.crashes) {
      if (!c.report) continue;
      const std::string n = std::to_string(c.exec_index);
      std::ofstream(dir / ("crash_" + n + ".seed"), std::ios::binary)
          .write(reinterpret_cast<const char*>(c.seed.bytes.data()),
                 static_cast<std::streamsize>(c.seed.bytes.size()));
      const auto path = write_witness(
          dir, *c.report, "gbf-" + std::to_string(f.seed) + "-" + n);
      if (!f.json) out << "witness: " << path << "\n";
    }
  }
  return r.crashes.empty() ? kExitUnknown : kExitUnsafe;
}

int cmd_bmc(const Flags& f, std::ostream& out, std::ostream& err) {
  const Program p = load(f.program, err);
  BmcConfig config = bmc_config(f);
  config.max_time = budget_of(f);
  BmcStats stats;
  const EngineVerdict v = bmc_check(p, config, &stats);
  out << "verdict: " << describe(v) << "\n"
      << "states: " << stats.states << ", hash hits: " << stats.hash_hits
      << ", domain size: " << stats.domain_size << "\n";
  if (v.counterexample) {
    out << "counterexample:\n  inputs:";
    for (Value x : v.counterexample->inputs) out << " " << x;
    out << "\n  schedule:";
    for (int t : v.counterexample->schedule) out << " t" << t;
    out << "\n";
  }
  if (v.witness) {
    out << "witness: "
        << write_witness(out_dir(f), *v.witness, "bmc-" + std::to_string(f.seed))
        << "\n";
  }
  switch (v.verdict) {
    case Verdict::kSafe:
      return kExitSafe;
    case Verdict::kBug:
      return kExitUnsafe;
    case Verdict::kUnknown:
      return kExitUnknown;
  }
  return kExitUnknown;
}

int cmd_replay(const Flags& f, std::ostream& out, std::ostream& err) {
  const Program p = load(f.program, err);
  CrashReport report;
  ExecOutcome outcome;
  try {
    report = deserialize(read_file(f.witness));
    outcome = replay(p, report);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const bool ok = reproduces(report, outcome);
  for (const auto& fnd : outcome.findings) {
    out << (ok ? "reproduced: " : "found: ") << describe(fnd) << "\n";
  }
  if (!ok) {
    out << "recorded findings were not reproduced\n";
    return kExitUnknown;
  }
  return kExitUnsafe;
}

struct SweepPoint {
  std::string label;
  Flags flags;
  std::optional<std::pair<double, double>> split;  // bmc, fuzz
};

bool hit_fuzz(const Program& p, const Expectation& e, const Flags& f) {
  FuzzOptions options;
  options.exec = exec_config(f);
  options.budget.max_execs = f.execs.value_or(kDefaultSweepExecs);
  options.master_seed = f.seed;
  options.stop_on_bug = true;
  options.stop_kind = e.kind;
  options.witnesses = WitnessPolicy::kNone;
  EnsembleConfig defaults;
  SplitMix64 rng(f.seed);
  const auto seeds = make_seeds(EngineVerdict{}, defaults, p.nondet_sites(), rng);
  return fuzz(p, seeds, options).found(*e.kind);
}

bool hit_ensemble(const Program& p, const Expectation& e, const Flags& f,
                  std::pair<double, double> split) {
  Flags g = f;
  g.bmc_frac = split.first;
  g.fuzz_frac = split.second;
  if (!g.execs) g.execs = kDefaultSweepExecs;
  const EnsembleConfig config = ensemble_config(g);
  const FinalVerdict v = run_ebf(p, config, f.seed);
  if (v.outcome != Outcome::kUnsafe) return false;
  return std::any_of(v.findings.begin(), v.findings.end(),
                     [&](const Finding& x) { return x.kind == *e.kind; });
}

int cmd_sweep(const Flags& f, std::ostream& out, std::ostream& err) {
  std::vector<SweepPoint> points;
  for (const auto& value : f.values) {
    SweepPoint pt{value, f, std::nullopt};
    try {
      if (f.axis == "thread-threshold") {
        pt.flags.max_threads = std::stoi(value);
      } else if (f.axis == "delay-max") {
        pt.flags.delay_max = std::stoull(value);
      } else if (f.axis == "exit-prob") {
        pt.flags.exit_prob = std::stod(value);
      } else if (f.axis == "bmc-share") {
        // B:F weights for the two engines; overhead keeps its default share
        // unless one engine is switched off.
        const auto colon = value.find(':');
        if (colon == std::string::npos) throw UsageError("");
        const double b = std::stod(value.substr(0, colon));
        const double z = std::stod(value.substr(colon + 1));
        if (b < 0 || z < 0 || b + z <= 0) throw UsageError("");
        const double engines = (b == 0 || z == 0) ? 1.0 : 11.0 / 15.0;
        pt.split = {engines * b / (b + z), engines * z / (b + z)};
      } else {
        throw UsageError("unknown --axis '" + f.axis +
                         "' (thread-threshold, delay-max, exit-prob, "
                         "bmc-share)");
      }
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("invalid value '" + value + "' for axis " + f.axis);
    }
    points.push_back(std::move(pt));
  }

  std::vector<std::pair<std::string, std::vector<bool>>> rows;
  std::vector<int> totals(points.size(), 0);
  for (const auto& entry : list_corpus(f.program)) {
    const std::string name = entry.path.filename().string();
    if (!entry.expected) {
      err << "warning: " << name << ": missing or invalid ground truth, skipped\n";
      continue;
    }
    const Program p = load(entry.path.string(), err);
    std::vector<bool> hits;
    for (std::size_t i = 0; i < points.size(); ++i) {
      bool hit = false;
      if (entry.expected->unsafe) {
        hit = points[i].split
                  ? hit_ensemble(p, *entry.expected, points[i].flags,
                                 *points[i].split)
                  : hit_fuzz(p, *entry.expected, points[i].flags);
      }
      hits.push_back(hit);
      totals[i] += hit ? 1 : 0;
    }
    rows.emplace_back(name, std::move(hits));
  }

  std::size_t width = 14;
  for (const auto& [name, _] : rows) width = std::max(width, name.size() + 2);
  out << std::left << std::setw(static_cast<int>(width)) << f.axis;
  for (const auto& pt : points) out << std::setw(10) << pt.label;
  out << "\n";
  for (const auto& [name, hits] : rows) {
    out << std::setw(static_cast<int>(width)) << name;
    for (bool h : hits) out << std::setw(10) << (h ? "x" : ".");
    out << "\n";
  }
  if (!rows.empty()) {
    out << std::setw(static_cast<int>(width)) << "correct-false";
    for (int t : totals) out << std::setw(10) << t;
    out << "\n";
  }
  return kExitSafe;
}

}  // namespace

int exit_code(Outcome outcome) {
  switch (outcome) {
    case Outcome::kSafe:
      return kExitSafe;
    case Outcome::kUnsafe:
      return kExitUnsafe;
    case Outcome::kUnknown:
      return kExitUnknown;
    case Outcome::kConflict:
      return kExitConflict;
  }
  return kExitUnknown;
}

std::optional<std::chrono::milliseconds> parse_duration(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0;
  std::size_t i = 0;
  while (i < text.size() &&
         ((text[i] >= '0' && text[i] <= '9') || text[i] == '.')) {
    ++i;
  }
  if (i == 0) return std::nullopt;
  const std::string number(text.substr(0, i));
  try {
    std::size_t used = 0;
    value = std::stod(number, &used);
    if (used != number.size()) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  const std::string_view unit = text.substr(i);
  double ms = 0;
  if (unit.empty() || unit == "s") {
    ms = value * 1000;
  } else if (unit == "ms") {
    ms = value;
  } else if (unit == "m") {
    ms = value * 60000;
  } else if (unit == "h") {
    ms = value * 3600000;
  } else {
    return std::nullopt;
  }
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms + 0.5));
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Ensemble bounded model checking and concurrency fuzzing for "
               ".cir programs",
               "ebf"};
  app.require_subcommand(1);
  Flags f;

  auto* parse = app.add_subcommand("parse", "Parse and validate a program");
  parse->add_option("program", f.program, "Program (.cir)")->required();
  parse->add_flag("--canonical", f.canonical, "Print the canonical text");

  auto* check = app.add_subcommand("check", "Run the ensemble");
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Run the fuzzer only");
  auto* bmc = app.add_subcommand("bmc", "Run the bounded model checker only");
  for (auto* sub : {check, fuzz_cmd, bmc}) {
    sub->add_option("program", f.program, "Program (.cir)")->required();
    add_common(sub, f);
  }

  auto* replay_cmd = app.add_subcommand("replay", "Replay a witness file");
  replay_cmd->add_option("program", f.program, "Program (.cir)")->required();
  replay_cmd->add_option("witness", f.witness, "Witness file")->required();

  auto* sweep = app.add_subcommand("sweep", "Parameter sweep over a corpus");
  sweep->add_option("dir", f.program, "Corpus directory")->required();
  sweep->add_option("--axis", f.axis,
                    "thread-threshold | delay-max | exit-prob | bmc-share")
      ->required();
  sweep->add_option("--values", f.values, "Values of the swept parameter")
      ->required()
      ->delimiter(',');
  add_common(sweep, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  for (auto* sub : {check, fuzz_cmd, bmc, sweep}) {
    if (*sub && sub->count("--budget") > 0) f.budget_given = true;
  }

  try {
    if (*parse) return cmd_parse(f, out, err);
    if (*check) return cmd_check(f, out, err);
    if (*fuzz_cmd) return cmd_fuzz(f, out, err);
    if (*bmc) return cmd_bmc(f, out, err);
    if (*replay_cmd) return cmd_replay(f, out, err);
    if (*sweep) return cmd_sweep(f, out, err);
  } catch (const UsageError& e) {
    if (e.what()[0] != '\0') err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ebf::cli
