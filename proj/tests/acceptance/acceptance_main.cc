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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cli.h"
#include "ebf/bmc.h"
#include "ebf/corpus.h"
#include "ebf/ensemble.h"
#include "ebf/exec.h"
#include "ebf/gbf.h"
#include "ebf/mir.h"
#include "ebf/seed.h"
#include "ebf/witness.h"
#include "support/oracle.h"
#include "support/random_program.h"

namespace ebf {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kMasterSeed = 7;
constexpr std::uint64_t kAblationExecs = 100000;

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

fs::path corpus_path(std::string_view name) {
  return fs::path(EBF_CORPUS_DIR) / name;
}

// FNV-1a, fed incrementally so large crash sets need not be kept as text.
class Digest {
 public:
  void add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
    add_raw(0xff);
  }
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) add_raw(static_cast<unsigned char>(v >> (8 * i)));
  }
  std::uint64_t value() const { return h_; }

 private:
  void add_raw(unsigned char c) {
    h_ ^= c;
    h_ *= 0x100000001b3ULL;
  }
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

void digest_findings(Digest& d, const std::vector<Finding>& findings) {
  d.add(findings.size());
  for (const Finding& f : findings) {
    d.add(to_string(f.kind));
    d.add(f.location.str());
    d.add(f.tick);
    d.add(f.step);
  }
}

void digest_fuzz(Digest& d, const FuzzResult& r) {
  d.add(r.executions);
  d.add(r.crashes.size());
  for (const Crash& c : r.crashes) {
    d.add(c.seed.hex());
    d.add(c.exec_index);
    digest_findings(d, c.outcome.findings);
    if (c.report) d.add(serialize(*c.report));
  }
  d.add(r.queue.size());
  for (const FuzzSeed& s : r.queue) d.add(s.hex());
  for (const CoverageEdge& e : r.coverage) d.add(e.packed());
}

void digest_verdict(Digest& d, const EngineVerdict& v) {
  d.add(to_string(v.verdict));
  digest_findings(d, v.findings);
  if (v.counterexample) {
    for (Value x : v.counterexample->inputs) d.add(static_cast<std::uint64_t>(x));
    for (int t : v.counterexample->schedule) d.add(static_cast<std::uint64_t>(t));
  }
  if (v.witness) d.add(serialize(*v.witness));
  d.add(v.note);
}

// Replays every crash of criteria 2-4 through its serialized witness.
struct ReplayTally {
  std::uint64_t crashes = 0;
  std::uint64_t reproduced = 0;
  std::string first_failure;

  void note_failure(const std::string& what) {
    if (first_failure.empty()) first_failure = what;
  }

  bool same_bugs(const std::vector<Finding>& a, const std::vector<Finding>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].same_bug(b[i])) return false;
    }
    return true;
  }

  void replay_report(const Program& p, const CrashReport& report,
                     const std::vector<Finding>& expected,
                     const std::string& label) {
    ++crashes;
    try {
      const CrashReport back = deserialize(serialize(report));
      const ExecOutcome again = replay(p, back);
      if (reproduces(back, again) && same_bugs(again.findings, expected)) {
        ++reproduced;
        return;
      }
      note_failure(label + ": findings differ on replay");
    } catch (const std::exception& e) {
      note_failure(label + ": " + e.what());
    }
  }

  void replay_fuzz(const Program& p, const FuzzResult& r,
                   const ExecConfig& exec, const std::string& label) {
    ExecConfig rec = exec;
    rec.record_witness = true;
    for (const Crash& c : r.crashes) {
      const auto inputs = c.seed.inputs();
      const ExecOutcome again = run(p, inputs, c.seed.delay_seed(), rec);
      const auto report = record(p, again, label, rec.echo());
      if (!report) {
        ++crashes;
        note_failure(label + ": crash did not recur from its seed");
        continue;
      }
      replay_report(p, *report, c.outcome.findings,
                    label + " exec " + std::to_string(c.exec_index));
    }
  }
};

struct Check {
  bool pass = false;
  std::string detail;
  std::uint64_t digest = 0;
};

std::vector<FuzzSeed> cli_seeds(const Program& p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return make_seeds(EngineVerdict{}, EnsembleConfig{}, p.nondet_sites(), rng);
}

// 1. The decision matrix, cell by cell.
Check criterion1() {
  struct Cell {
    Verdict bmc, gbf;
    Outcome want;
  };
  const Cell cells[] = {
      {Verdict::kSafe, Verdict::kBug, Outcome::kConflict},
      {Verdict::kSafe, Verdict::kUnknown, Outcome::kSafe},
      {Verdict::kBug, Verdict::kBug, Outcome::kUnsafe},
      {Verdict::kBug, Verdict::kUnknown, Outcome::kUnsafe},
      {Verdict::kUnknown, Verdict::kBug, Outcome::kUnsafe},
      {Verdict::kUnknown, Verdict::kUnknown, Outcome::kUnknown},
  };
  int ok = 0;
  for (const Cell& c : cells) ok += aggregate(c.bmc, c.gbf) == c.want;
  return {ok == 6, std::to_string(ok) + "/6 cells"};
}

// 2. Listing-1 analog: oracle reachability, BMC, fuzzing.
Check criterion2(ReplayTally* tally) {
  Check out;
  Digest d;
  const Program p = load_program(corpus_path("listing1.cir"));

  testing::ExhaustiveOracle oracle(p, {-1, 0, 1}, {});
  const testing::OracleResult reach = oracle.explore();
  const bool reachable = reach.kinds.count(BugKind::kAssertionFailure) > 0;
  const bool five = reach.bug_states.count({5}) > 0;

  auto t = Clock::now();
  const EngineVerdict bmc = bmc_check(p, BmcConfig{});
  const double bmc_s = since(t);
  bool bmc_ok = bmc.verdict == Verdict::kBug && bmc.witness &&
                bmc_s < 10.0 &&
                bmc.counterexample->finding.kind == BugKind::kAssertionFailure;
  if (bmc_ok) {
    const CrashReport back = deserialize(serialize(*bmc.witness));
    bmc_ok = reproduces(back, replay(p, back));
    if (tally) tally->replay_report(p, *bmc.witness, bmc.findings, "listing1 bmc");
  }
  digest_verdict(d, bmc);

  FuzzOptions o;
  o.budget.max_execs = kAblationExecs;
  o.master_seed = kMasterSeed;
  t = Clock::now();
  const FuzzResult r = fuzz(p, cli_seeds(p, kMasterSeed), o);
  const double fuzz_s = since(t);
  const std::size_t hits = r.crash_count(BugKind::kAssertionFailure);
  const bool fuzz_ok = hits >= 1 && fuzz_s < 60.0;
  digest_fuzz(d, r);
  if (tally) tally->replay_fuzz(p, r, o.exec, "listing1 gbf");

  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << "oracle "
    << (reachable ? "reachable" : "UNREACHABLE") << " (" << reach.states
    << " states, a=5 " << (five ? "reachable" : "unreachable") << "); bmc "
    << to_string(bmc.verdict) << " in " << bmc_s << "s; fuzz " << hits
    << " AssertionFailure crashes in " << fuzz_s << "s";
  out.pass = reachable && bmc_ok && fuzz_ok;
  out.detail = s.str();
  out.digest = d.value();
  return out;
}

// 3. BMC against the brute-force enumerator on random loop-free programs.
Check criterion3(ReplayTally* tally) {
  Check out;
  Digest d;
  const auto t = Clock::now();
  testing::ProgramGenerator gen(20240607);
  int mismatches = 0;
  int bugs = 0;
  std::string first;
  for (int i = 0; i < 100; ++i) {
    const Program p = parse_program(gen.next());
    BmcConfig c;
    c.k = 64;
    c.C = 64;
    c.auto_domain = false;
    c.input_domain = {-1, 0, 1};
    testing::ExhaustiveOracle oracle(p, c.input_domain, {});
    const bool expected = oracle.explore().bug();
    const EngineVerdict v = bmc_check(p, c);
    digest_verdict(d, v);
    const bool got_bug = v.verdict == Verdict::kBug;
    if (v.verdict == Verdict::kUnknown || got_bug != expected) {
      ++mismatches;
      if (first.empty()) first = " first mismatch:\n" + to_text(p);
    }
    if (got_bug) {
      ++bugs;
      if (tally && v.witness) {
        tally->replay_report(p, *v.witness, v.findings,
                             "random program " + std::to_string(i));
      }
    }
  }
  const double secs = since(t);
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << "100 programs, " << bugs
    << " Bug / " << 100 - bugs << " Safe, " << mismatches << " mismatches, "
    << secs << "s" << first;
  out.pass = mismatches == 0 && secs < 120.0;
  out.detail = s.str();
  out.digest = d.value();
  return out;
}

// 4. Delay ablation over the schedule-bug sub-corpus.
Check criterion4(ReplayTally* tally) {
  Check out;
  Digest d;
  int programs = 0;
  int with_delay = 0;
  int baseline = 0;
  for (const auto& e : list_corpus(EBF_CORPUS_DIR)) {
    if (!e.expected || !e.expected->schedule || !e.expected->kind) continue;
    ++programs;
    const Program p = load_program(e.path);
    const std::string name = e.path.stem().string();
    for (std::uint64_t delay : {std::uint64_t{100}, std::uint64_t{0}}) {
      FuzzOptions o;
      o.budget.max_execs = kAblationExecs;
      o.master_seed = kMasterSeed;
      o.exec.delay_max = delay;
      const FuzzResult r = fuzz(p, cli_seeds(p, kMasterSeed), o);
      digest_fuzz(d, r);
      const bool hit = r.found(*e.expected->kind);
      (delay == 0 ? baseline : with_delay) += hit ? 1 : 0;
      if (tally) {
        tally->replay_fuzz(p, r, o.exec,
                           name + " delay " + std::to_string(delay));
      }
    }
  }
  out.pass = programs >= 20 && with_delay >= 3 * baseline &&
             with_delay > baseline;
  out.detail = std::to_string(programs) + " programs: delay_max=100 finds " +
               std::to_string(with_delay) + ", delay_max=0 finds " +
               std::to_string(baseline);
  out.digest = d.value();
  return out;
}

// 5. Replay fidelity plus text round trips.
Check criterion5(const ReplayTally& tally) {
  SplitMix64 rng(kMasterSeed);
  int identical = 0;
  for (int i = 0; i < 1000; ++i) {
    const CrashReport r = testing::random_report(rng);
    const std::string text = serialize(r);
    try {
      const CrashReport back = deserialize(text);
      identical += back == r && serialize(back) == text;
    } catch (const WitnessFormatError&) {
    }
  }
  std::string detail = std::to_string(tally.reproduced) + "/" +
                       std::to_string(tally.crashes) +
                       " crashes replayed to identical findings; " +
                       std::to_string(identical) + "/1000 round trips";
  if (!tally.first_failure.empty()) detail += "; " + tally.first_failure;
  return {tally.crashes > 0 && tally.reproduced == tally.crashes &&
              identical == 1000,
          detail};
}

// 6. The thread-count valve ends every run of a thread bomb.
Check criterion6() {
  const Program p = load_program(corpus_path("thread_bomb.cir"));
  FuzzOptions o;
  o.budget.max_execs = 20000;
  o.master_seed = kMasterSeed;
  o.exec.thread_threshold = 5;
  std::uint64_t runs = 0;
  std::uint64_t exhausted = 0;
  std::uint64_t findings = 0;
  o.observer = [&](const FuzzExecEvent& e) {
    ++runs;
    exhausted += e.outcome->status == ExecStatus::kExhausted;
    findings += e.outcome->findings.size();
  };
  const auto t = Clock::now();
  const FuzzResult r = fuzz(p, cli_seeds(p, kMasterSeed), o);
  const double secs = since(t);
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << exhausted << "/" << runs
    << " runs Exhausted, " << findings << " findings, " << secs << "s";
  return {runs == 20000 && exhausted == runs && findings == 0 &&
              r.crashes.empty(),
          s.str()};
}

bool fuzz_finds(const Program& p, BugKind kind, std::uint64_t execs) {
  FuzzOptions o;
  o.budget.max_execs = execs;
  o.master_seed = kMasterSeed;
  o.stop_on_bug = true;
  o.stop_kind = kind;
  o.witnesses = WitnessPolicy::kNone;
  return fuzz(p, cli_seeds(p, kMasterSeed), o).found(kind);
}

bool bmc_finds(const Program& p, BugKind kind) {
  const EngineVerdict v = bmc_check(p, BmcConfig{});
  if (v.verdict != Verdict::kBug) return false;
  for (const Finding& f : v.findings) {
    if (f.kind == kind) return true;
  }
  return false;
}

// 7. Detector correctness.
Check criterion7() {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  const Program race = load_program(corpus_path("fig1a_race.cir"));
  expect(fuzz_finds(race, BugKind::kDataRace, 1000), "fig1a race");

  const Program locked = load_program(corpus_path("fig1a_locked.cir"));
  FuzzOptions o;
  o.budget.max_execs = 1000;
  o.master_seed = kMasterSeed;
  std::uint64_t false_positives = 0;
  o.observer = [&](const FuzzExecEvent& e) {
    false_positives += e.outcome->findings.size();
  };
  fuzz(locked, cli_seeds(locked, kMasterSeed), o);
  expect(false_positives == 0, "fig1a locked variant flagged");

  const Program abba = load_program(corpus_path("abba_deadlock.cir"));
  expect(bmc_finds(abba, BugKind::kDeadlock), "abba deadlock (bmc)");
  expect(fuzz_finds(abba, BugKind::kDeadlock, 10000), "abba deadlock (gbf)");

  const Program leak = load_program(corpus_path("fig1c_thread_leak.cir"));
  expect(fuzz_finds(leak, BugKind::kThreadLeak, 1000), "fig1c thread leak");

  for (const char* name :
       {"heap_uaf", "heap_oob", "heap_double_free", "heap_leak"}) {
    const fs::path path = corpus_path(std::string(name) + ".cir");
    const auto want =
        parse_expectation(read_file(corpus_path(std::string(name) +
                                                ".expected")));
    const Program p = load_program(path);
    ExecConfig c;
    const ExecOutcome first = run(p, {}, kMasterSeed, c);
    expect(want && want->kind && !first.findings.empty() &&
               first.findings.front().kind == *want->kind,
           name);
  }

  // Vector clocks against the naive happens-before closure.
  std::uint64_t traces = 0;
  std::uint64_t disagreements = 0;
  ExecConfig traced;
  traced.record_accesses = true;
  traced.exit_prob = 0;
  auto compare = [&](const Program& p, std::uint64_t seeds,
                     std::uint64_t delay) {
    traced.delay_max = delay;
    for (std::uint64_t s = 0; s < seeds; ++s) {
      const ExecOutcome r = run(p, {}, s, traced);
      if (r.accesses.size() > 200) continue;
      ++traces;
      std::set<std::uint64_t> reported;
      for (const Finding& f : r.findings) {
        if (f.kind == BugKind::kDataRace) reported.insert(f.step);
      }
      disagreements += reported != testing::naive_races(r.accesses);
    }
  };
  for (const auto& e : list_corpus(EBF_CORPUS_DIR)) {
    const Program p = load_program(e.path);
    compare(p, 20, 0);
    compare(p, 20, 10);
  }
  testing::ProgramGenerator gen(kMasterSeed, {.max_body = 8, .atomics = true});
  for (int i = 0; i < 300; ++i) compare(parse_program(gen.next()), 10, 6);
  expect(disagreements == 0, "vector clocks disagree with naive oracle");

  std::string detail = std::to_string(traces) + " traces, " +
                       std::to_string(disagreements) +
                       " disagreements; fig1a/1b/1c and heap fixtures";
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

// 8. Determinism of criteria 2, 3 and 4.
Check criterion8(const Check& c2, const Check& c3, const Check& c4) {
  const Check r2 = criterion2(nullptr);
  const Check r3 = criterion3(nullptr);
  const Check r4 = criterion4(nullptr);
  const bool same2 = r2.digest == c2.digest;
  const bool same3 = r3.digest == c3.digest;
  const bool same4 = r4.digest == c4.digest;
  std::ostringstream s;
  s << "criterion 2 " << (same2 ? "identical" : "DIFFERS") << ", 3 "
    << (same3 ? "identical" : "DIFFERS") << ", 4 "
    << (same4 ? "identical" : "DIFFERS");
  return {same2 && same3 && same4, s.str()};
}

// The totals row of `ebf sweep`.
std::vector<int> sweep_totals(const std::vector<std::string>& args,
                              std::string* table) {
  std::vector<const char*> argv{"ebf", "sweep", EBF_CORPUS_DIR};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  *table = out.str();
  std::vector<int> totals;
  if (code != 0) return totals;
  std::istringstream lines(out.str());
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("correct-false", 0) != 0) continue;
    std::istringstream fields(line.substr(13));
    int v = 0;
    while (fields >> v) totals.push_back(v);
  }
  return totals;
}

// 9. Sweep shape: delays and the engine split.
Check criterion9() {
  std::string delay_table;
  const auto delay = sweep_totals(
      {"--axis", "delay-max", "--values", "0,10,100,1000", "--execs", "20000",
       "--seed", std::to_string(kMasterSeed)},
      &delay_table);
  std::string share_table;
  const auto share = sweep_totals(
      {"--axis", "bmc-share", "--values", "6:5,0:1", "--budget", "4s",
       "--execs", "20000", "--seed", std::to_string(kMasterSeed)},
      &share_table);
  if (delay.size() != 4 || share.size() != 2) {
    return {false, "sweep failed:\n" + delay_table + share_table};
  }
  const int best = std::max({delay[1], delay[2], delay[3]});
  std::ostringstream s;
  s << "delay 0/10/100/1000 finds " << delay[0] << "/" << delay[1] << "/"
    << delay[2] << "/" << delay[3] << "; split 6:5 finds " << share[0]
    << ", fuzz-only finds " << share[1];
  return {delay[0] < best && share[1] < share[0], s.str()};
}

}  // namespace
}  // namespace ebf

int main() {
  using ebf::Check;
  bool all = true;
  auto report = [&all](int id, const char* name, const Check& c, double secs) {
    all = all && c.pass;
    std::cout << (c.pass ? "PASS" : "FAIL") << " [" << id << "] " << name
              << ": " << c.detail << " (" << std::fixed
              << std::setprecision(1) << secs << "s)" << std::endl;
  };
  auto timed = [](auto&& fn) {
    const auto t = ebf::Clock::now();
    Check c = fn();
    return std::pair<Check, double>(std::move(c), ebf::since(t));
  };

  ebf::ReplayTally tally;
  auto [c1, t1] = timed([] { return ebf::criterion1(); });
  report(1, "decision matrix", c1, t1);
  auto [c2, t2] = timed([&] { return ebf::criterion2(&tally); });
  report(2, "listing-1 fixture", c2, t2);
  auto [c3, t3] = timed([&] { return ebf::criterion3(&tally); });
  report(3, "oracle equivalence", c3, t3);
  auto [c4, t4] = timed([&] { return ebf::criterion4(&tally); });
  report(4, "delay ablation", c4, t4);
  auto [c5, t5] = timed([&] { return ebf::criterion5(tally); });
  report(5, "witness replay fidelity", c5, t5);
  auto [c6, t6] = timed([] { return ebf::criterion6(); });
  report(6, "thread-threshold valve", c6, t6);
  auto [c7, t7] = timed([] { return ebf::criterion7(); });
  report(7, "detector correctness", c7, t7);
  auto [c8, t8] = timed([&] { return ebf::criterion8(c2, c3, c4); });
  report(8, "determinism", c8, t8);
  auto [c9, t9] = timed([] { return ebf::criterion9(); });
  report(9, "parameter-sweep shape", c9, t9);
  return all ? 0 : 1;
}
