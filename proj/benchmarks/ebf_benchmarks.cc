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

#include <benchmark/benchmark.h>

#include <filesystem>
#include <string>
#include <vector>

#include "ebf/bmc.h"
#include "ebf/corpus.h"
#include "ebf/exec.h"
#include "ebf/gbf.h"
#include "ebf/mir.h"
#include "ebf/race.h"
#include "ebf/witness.h"

namespace ebf {
namespace {

Program corpus_program(const char* name) {
  return load_program(std::filesystem::path(EBF_CORPUS_DIR) / name);
}

void BM_Parse(benchmark::State& state) {
  const std::string text = read_file(
      std::filesystem::path(EBF_CORPUS_DIR) / "reader_writer_invariant.cir");
  for (auto _ : state) benchmark::DoNotOptimize(parse_program(text));
}
BENCHMARK(BM_Parse);

// One delay-injected execution; arg is delay_max.
void BM_RunListing1(benchmark::State& state) {
  const Program p = corpus_program("listing1.cir");
  ExecConfig c;
  c.delay_max = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run(p, {}, seed++, c));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RunListing1)->Arg(0)->Arg(100);

void BM_RunRecording(benchmark::State& state) {
  const Program p = corpus_program("listing1.cir");
  ExecConfig c;
  c.record_witness = true;
  c.record_accesses = true;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run(p, {}, seed++, c));
}
BENCHMARK(BM_RunRecording);

void BM_Fuzz1000(benchmark::State& state) {
  const Program p = corpus_program("check_then_act.cir");
  FuzzOptions o;
  o.budget.max_execs = 1000;
  o.witnesses = WitnessPolicy::kNone;
  const std::vector<FuzzSeed> seeds{FuzzSeed::encode(std::vector<Value>{}, 1)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuzz(p, seeds, o));
    ++o.master_seed;
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Fuzz1000)->Unit(benchmark::kMillisecond);

void BM_Mutate(benchmark::State& state) {
  SplitMix64 rng(1);
  FuzzSeed s = FuzzSeed::encode(std::vector<Value>{1, 2, 3}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(mutate_input(s, rng));
}
BENCHMARK(BM_Mutate);

// Bounded model checking; arg is the context-switch bound.
void BM_BmcSafeCounter(benchmark::State& state) {
  const Program p = corpus_program("safe_counter.cir");
  BmcConfig c;
  c.C = static_cast<int>(state.range(0));
  BmcStats stats;
  for (auto _ : state) benchmark::DoNotOptimize(bmc_check(p, c, &stats));
  state.counters["states"] = static_cast<double>(stats.states);
}
BENCHMARK(BM_BmcSafeCounter)->Arg(2)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_BmcHashing(benchmark::State& state) {
  const Program p = corpus_program("safe_counter.cir");
  BmcConfig c;
  c.C = 4;
  c.state_hashing = state.range(0) != 0;
  BmcStats stats;
  for (auto _ : state) benchmark::DoNotOptimize(bmc_check(p, c, &stats));
  state.counters["states"] = static_cast<double>(stats.states);
}
BENCHMARK(BM_BmcHashing)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RaceDetector(benchmark::State& state) {
  for (auto _ : state) {
    RaceDetector d(1);
    d.start_thread(0);
    d.on_create(0, 1);
    d.on_create(0, 2);
    for (int i = 0; i < 100; ++i) {
      const int t = 1 + (i & 1);
      d.on_acquire(t, 0);
      benchmark::DoNotOptimize(d.on_write(t, i % 7));
      d.on_release(t, 0);
    }
  }
}
BENCHMARK(BM_RaceDetector);

void BM_WitnessRoundTrip(benchmark::State& state) {
  const Program p = corpus_program("listing1.cir");
  const EngineVerdict v = bmc_check(p, BmcConfig{});
  const CrashReport& r = *v.witness;
  for (auto _ : state) benchmark::DoNotOptimize(deserialize(serialize(r)));
}
BENCHMARK(BM_WitnessRoundTrip);

}  // namespace
}  // namespace ebf

BENCHMARK_MAIN();
