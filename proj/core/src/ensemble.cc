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


#include "ebf/ensemble.h"

#include <cmath>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>
#include <stdexcept>

namespace ebf {

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::milliseconds share(std::chrono::milliseconds total, double frac) {
  return std::chrono::milliseconds(
      static_cast<std::int64_t>(std::llround(total.count() * frac)));
}

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

EngineVerdict skipped(std::string engine) {
  EngineVerdict v;
  v.engine = std::move(engine);
  v.note = "skipped (zero budget share)";
  return v;
}

nlohmann::json finding_json(const Finding& f) {
  return {{"kind", to_string(f.kind)},
          {"location", f.location.str()},
          {"tick", f.tick},
          {"detail", f.detail}};
}

nlohmann::json engine_json(const EngineVerdict& v) {
  nlohmann::json j = {{"verdict", to_string(v.verdict)},
                      {"work", v.work},
                      {"seconds", v.seconds},
                      {"findings", nlohmann::json::array()}};
  for (const auto& f : v.findings) j["findings"].push_back(finding_json(f));
  if (!v.note.empty()) j["note"] = v.note;
  if (v.counterexample) {
    j["counterexample"] = {{"inputs", v.counterexample->inputs},
                           {"schedule", v.counterexample->schedule}};
  }
  return j;
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kSafe:
      return "Safe";
    case Outcome::kUnsafe:
      return "Unsafe";
    case Outcome::kUnknown:
      return "Unknown";
    case Outcome::kConflict:
      return "Conflict";
  }
  return "?";
}

Outcome aggregate(Verdict bmc, Verdict gbf) {
  const bool gbf_bug = gbf == Verdict::kBug;
  switch (bmc) {
    case Verdict::kSafe:
      return gbf_bug ? Outcome::kConflict : Outcome::kSafe;
    case Verdict::kBug:
      return Outcome::kUnsafe;
    case Verdict::kUnknown:
      return gbf_bug ? Outcome::kUnsafe : Outcome::kUnknown;
  }
  return Outcome::kUnknown;
}

void EnsembleConfig::validate() const {
  for (double f : {bmc_frac, fuzz_frac, overhead_frac}) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw std::invalid_argument("budget fractions must lie in [0, 1]");
    }
  }
  if (std::fabs(bmc_frac + fuzz_frac + overhead_frac - 1.0) > 1e-9) {
    throw std::invalid_argument("budget fractions must sum to 1");
  }
  if (total_budget.count() < 0) {
    throw std::invalid_argument("total budget must not be negative");
  }
  if (seed_count < 1) throw std::invalid_argument("seed_count must be positive");
  if (seed_lo > seed_hi) throw std::invalid_argument("empty seed value range");
  if (jobs < 1) throw std::invalid_argument("jobs must be positive");
  exec.validate();
  bmc.validate();
}

std::string EnsembleConfig::echo() const {
  return "budget_ms=" + std::to_string(total_budget.count()) +
         " bmc_frac=" + std::to_string(bmc_frac) +
         " fuzz_frac=" + std::to_string(fuzz_frac) +
         " k=" + std::to_string(bmc.k) + " C=" + std::to_string(bmc.C) + " " +
         exec.echo();
}

std::vector<FuzzSeed> make_seeds(const EngineVerdict& bmc,
                                 const EnsembleConfig& config,
                                 std::size_t input_lanes, SplitMix64& rng) {
  std::vector<FuzzSeed> seeds;
  if (bmc.verdict == Verdict::kBug && bmc.counterexample) {
    seeds.push_back(counterexample_to_seed(*bmc.counterexample, rng));
  }
  while (seeds.size() < static_cast<std::size_t>(config.seed_count)) {
    seeds.push_back(
        random_seed(input_lanes, config.seed_lo, config.seed_hi, rng));
  }
  return seeds;
}

FinalVerdict run_ebf(const Program& program, const EnsembleConfig& config,
                     std::uint64_t master_seed) {
  config.validate();
  SplitMix64 rng(master_seed);
  FinalVerdict fv;
  fv.master_seed = master_seed;

  auto t = Clock::now();
  if (config.bmc_frac > 0) {
    BmcEngine engine(config.bmc);
    fv.bmc = engine.check(program, share(config.total_budget, config.bmc_frac));
    if (fv.bmc.note.rfind("engine error", 0) == 0) {
      spdlog::warn("bmc: {}", fv.bmc.note);
    }
  } else {
    fv.bmc = skipped("bmc");
  }
  fv.bmc_seconds = since(t);

  t = Clock::now();
  const auto seeds = make_seeds(fv.bmc, config, program.nondet_sites(), rng);
  if (config.fuzz_frac > 0) {
    fv.gbf.engine = "gbf";
    try {
      FuzzOptions options;
      options.budget.max_time = share(config.total_budget, config.fuzz_frac);
      options.budget.max_execs = config.fuzz_max_execs;
      options.exec = config.exec;
      options.master_seed = rng.next();
      options.stop_on_bug = true;
      options.jobs = config.jobs;
      const FuzzResult r = fuzz(program, seeds, options);
      fv.gbf.work = r.executions;
      fv.gbf.seconds = r.seconds;
      if (!r.crashes.empty()) {
        fv.gbf.verdict = Verdict::kBug;
        fv.gbf.findings = r.crashes.front().outcome.findings;
        fv.gbf.witness = r.crashes.front().report;
      } else {
        fv.gbf.note = "no crash within budget";
      }
    } catch (const std::exception& e) {
      fv.gbf.verdict = Verdict::kUnknown;
      fv.gbf.note = std::string("engine error: ") + e.what();
      spdlog::warn("gbf: {}", fv.gbf.note);
    }
  } else {
    fv.gbf = skipped("gbf");
  }
  fv.fuzz_seconds = since(t);

  t = Clock::now();
  fv.outcome = aggregate(fv.bmc.verdict, fv.gbf.verdict);
  fv.findings = fv.bmc.findings;
  for (const auto& f : fv.gbf.findings) {
    bool dup = false;
    for (const auto& g : fv.findings) dup = dup || g.same_bug(f);
    if (!dup) fv.findings.push_back(f);
  }
  if (fv.bmc.verdict == Verdict::kBug && fv.bmc.witness) {
    fv.witness = fv.bmc.witness;
    fv.witness_engine = "bmc";
  } else if (fv.gbf.verdict == Verdict::kBug && fv.gbf.witness) {
    fv.witness = fv.gbf.witness;
    fv.witness_engine = "gbf";
  }
  fv.overhead_seconds = since(t);
  return fv;
}

std::string to_json(const FinalVerdict& verdict, const EnsembleConfig& config,
                    std::string_view program_path,
                    std::string_view witness_path) {
  nlohmann::json j;
  j["program"] = program_path;
  j["outcome"] = to_string(verdict.outcome);
  j["seed"] = verdict.master_seed;
  j["engines"] = {{"bmc", engine_json(verdict.bmc)},
                  {"gbf", engine_json(verdict.gbf)}};
  j["findings"] = nlohmann::json::array();
  for (const auto& f : verdict.findings) {
    j["findings"].push_back(finding_json(f));
  }
  if (verdict.witness) {
    j["witness"] = {{"engine", verdict.witness_engine},
                    {"path", witness_path}};
  } else {
    j["witness"] = nullptr;
  }
  j["timings"] = {{"bmc_seconds", verdict.bmc_seconds},
                  {"fuzz_seconds", verdict.fuzz_seconds},
                  {"overhead_seconds", verdict.overhead_seconds}};
  j["config"] = {{"budget_ms", config.total_budget.count()},
                 {"bmc_frac", config.bmc_frac},
                 {"fuzz_frac", config.fuzz_frac},
                 {"overhead_frac", config.overhead_frac},
                 {"seed_count", config.seed_count},
                 {"seed_range", {config.seed_lo, config.seed_hi}},
                 {"k", config.bmc.k},
                 {"C", config.bmc.C},
                 {"input_domain", config.bmc.input_domain},
                 {"bmc_detectors", config.bmc.detectors.str()},
                 {"thread_threshold", config.exec.thread_threshold},
                 {"delay_max", config.exec.delay_max},
                 {"exit_prob", config.exec.exit_prob},
                 {"atomic_wait_bound", config.exec.wait_bound()},
                 {"step_budget", config.exec.step_budget},
                 {"detectors", config.exec.detectors.str()}};
  if (config.fuzz_max_execs) j["config"]["fuzz_max_execs"] = *config.fuzz_max_execs;
  return j.dump(2);
}

}  // namespace ebf
