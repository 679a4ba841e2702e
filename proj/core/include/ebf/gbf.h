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


// Coverage-guided gray-box fuzzing over seeds that drive both the program
// inputs and the delay PRNG. The loop: take the next queued seed round-robin,
// derive 1..16 single-mutation variants of it, run each; a bug-finding run
// is kept as a crash, any other run that reaches a new control-flow edge has
// its seed appended to the queue.

#ifndef EBF_GBF_H_
#define EBF_GBF_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "ebf/exec.h"
#include "ebf/seed.h"
#include "ebf/witness.h"

namespace ebf {

enum class Mutation : std::uint8_t {
  kBitFlip,
  kByteFlip,
  kLaneArith,
  kLaneOverwrite,
  kLaneDuplicate,
  kResize,
};

inline constexpr std::size_t kMaxSeedBytes = 1024;

// One random mutation. Pure in (seed, rng state); the result always differs
// from `seed`. An empty seed is extended by 8 random bytes.
FuzzSeed mutate_input(const FuzzSeed& seed, SplitMix64& rng);
FuzzSeed apply_mutation(const FuzzSeed& seed, Mutation m, SplitMix64& rng);

using EdgeSet = std::unordered_set<std::uint64_t>;

bool covers_new_trace(const EdgeSet& global, std::span<const CoverageEdge> run);

struct FuzzBudget {
  std::optional<std::uint64_t> max_execs;
  std::optional<std::chrono::milliseconds> max_time;
};

enum class StopReason : std::uint8_t { kBudget, kFirstBug, kSeedsExhausted };

std::string_view to_string(StopReason reason);

// Crash witnesses: none, one per distinct (kind, location), or every crash.
enum class WitnessPolicy : std::uint8_t { kNone, kDistinct, kAll };

struct FuzzExecEvent {
  std::uint64_t index = 0;  // 0-based execution number
  const FuzzSeed* seed = nullptr;
  const ExecOutcome* outcome = nullptr;
  bool new_coverage = false;
  bool queued = false;
  bool crashed = false;
  std::size_t queue_size = 0;  // after this execution
};

struct FuzzOptions {
  FuzzBudget budget;
  ExecConfig exec;
  std::uint64_t master_seed = 0;
  // Stop at the first crash; with stop_kind, at the first crash of that kind.
  bool stop_on_bug = false;
  std::optional<BugKind> stop_kind;
  int jobs = 1;
  WitnessPolicy witnesses = WitnessPolicy::kDistinct;
  std::function<void(const FuzzExecEvent&)> observer;
};

struct Crash {
  FuzzSeed seed;
  ExecOutcome outcome;
  std::uint64_t exec_index = 0;
  std::optional<CrashReport> report;
};

struct FuzzResult {
  std::vector<Crash> crashes;  // S_I, in discovery order
  std::vector<FuzzSeed> queue;  // Q_S at the end
  std::vector<CoverageEdge> coverage;  // sorted union over all runs
  std::uint64_t executions = 0;
  StopReason stop = StopReason::kBudget;
  double seconds = 0;

  // First crash finding per (kind, location), in discovery order.
  std::vector<Finding> distinct_bugs() const;
  std::size_t crash_count(BugKind kind) const;
  bool found(BugKind kind) const { return crash_count(kind) > 0; }
};

// Runs the loop. The corpus seeds are executed once each before mutation
// starts. With an execution budget and jobs == 1 the result is a pure
// function of the arguments; jobs > 1 gives the same result (mutants are
// generated sequentially and aggregated in order) but overshoots time
// budgets by at most one batch.
FuzzResult fuzz(const Program& program, std::vector<FuzzSeed> corpus,
                const FuzzOptions& options);

}  // namespace ebf

#endif  // EBF_GBF_H_
