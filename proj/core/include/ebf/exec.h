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

// Deterministic logical-time execution of a Program.
//
// After every instruction a thread executes outside an atomic region, the
// delay hook runs: the run ends as Exhausted if more than `thread_threshold`
// threads are active or a Bernoulli(exit_prob) draw succeeds; otherwise the
// thread sleeps for a uniform number of ticks in [0, delay_max]. At each
// scheduling point the lowest-id runnable thread whose wake tick has passed
// runs; when every runnable thread sleeps, time jumps to the earliest wake
// tick. All randomness comes from one splitmix64 stream seeded with the
// delay seed, drawing (exit, delay) in that order.

#ifndef EBF_EXEC_H_
#define EBF_EXEC_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ebf/finding.h"
#include "ebf/mir.h"
#include "ebf/witness.h"

namespace ebf {

enum class Detector : std::uint8_t {
  kRace = 1 << 0,
  kDeadlock = 1 << 1,
  kThreadLeak = 1 << 2,
  kMemory = 1 << 3,  // memory-safety faults and leaks
  kAssertion = 1 << 4,  // assert and error
};

class DetectorSet {
 public:
  constexpr DetectorSet() = default;
  static constexpr DetectorSet all() { return DetectorSet(0x1f); }
  static constexpr DetectorSet none() { return DetectorSet(0); }

  constexpr bool has(Detector d) const {
    return (bits_ & static_cast<std::uint8_t>(d)) != 0;
  }
  constexpr DetectorSet with(Detector d) const {
    return DetectorSet(bits_ | static_cast<std::uint8_t>(d));
  }
  constexpr DetectorSet without(Detector d) const {
    return DetectorSet(bits_ & ~static_cast<std::uint8_t>(d));
  }
  // Whether findings of this kind are reported under this set.
  bool reports(BugKind kind) const;

  // "race,deadlock,thread_leak,memory,assertion"; parse accepts "all"/"none".
  std::string str() const;
  static std::optional<DetectorSet> parse(std::string_view text);

  constexpr bool operator==(const DetectorSet&) const = default;

 private:
  constexpr explicit DetectorSet(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0;
};

struct ExecConfig {
  int thread_threshold = 5;
  std::uint64_t delay_max = 100;
  double exit_prob = 0.0001;
  // Ticks a thread waits for the atomic-region owner before the run ends as
  // Exhausted; unset means 10 * delay_max (at least 1).
  std::optional<std::uint64_t> atomic_wait_bound;
  std::uint64_t step_budget = 100000;
  DetectorSet detectors = DetectorSet::all();

  bool record_witness = false;   // keep the event log of bug-finding runs
  bool record_accesses = false;  // keep the synchronization/access trace
  bool collect_coverage = true;

  std::uint64_t wait_bound() const {
    if (atomic_wait_bound) return *atomic_wait_bound;
    return delay_max == 0 ? 1 : 10 * delay_max;
  }
  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
  // Single-line "key=value" echo; see witness replay.
  std::string echo() const;
};

enum class ExecStatus : std::uint8_t {
  kCompleted,
  kBugFound,
  kExhausted,
  kBudgetExceeded,
};

std::string_view to_string(ExecStatus status);

// Why the run stopped; finer-grained than the status.
enum class EndReason : std::uint8_t {
  kCompleted,      // every thread returned
  kFatalFinding,   // assertion, error, memory fault
  kDeadlock,       // every live thread blocked
  kThreadLimit,    // active threads above the threshold
  kProbabilisticExit,
  kAtomicTimeout,  // atomic-region owner blocked past the wait bound
  kAssumeFailed,
  kStepBudget,
  kScheduleEnd,    // forced schedule consumed with threads still runnable
};

std::string_view to_string(EndReason reason);

struct CoverageEdge {
  std::uint32_t kind = 0;
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  auto operator<=>(const CoverageEdge&) const = default;

  std::uint64_t packed() const {
    return (std::uint64_t{kind} << 42) | (std::uint64_t{from} << 21) | to;
  }
  static CoverageEdge unpack(std::uint64_t p) {
    return {static_cast<std::uint32_t>(p >> 42),
            static_cast<std::uint32_t>((p >> 21) & 0x1fffff),
            static_cast<std::uint32_t>(p & 0x1fffff)};
  }
};

// One entry of the access/synchronization trace. `object` is a shared
// variable index for reads/writes of shared memory, a heap cell key
// (1 << 62 | handle << 32 | index) for heap accesses, a mutex index for lock
// events (-1 for the atomic-region mutex), and a thread id for create/join.
struct AccessEvent {
  enum class Kind : std::uint8_t {
    kRead,
    kWrite,
    kHeapRead,
    kHeapWrite,
    kAcquire,
    kRelease,
    kCreate,
    kJoin,
    kExit,
  };
  Kind kind = Kind::kRead;
  int thread = 0;
  std::int64_t object = 0;
  std::uint64_t step = 0;
};

struct ExecOutcome {
  ExecStatus status = ExecStatus::kCompleted;
  EndReason end = EndReason::kCompleted;
  std::vector<Finding> findings;
  std::vector<CoverageEdge> coverage;  // sorted, unique
  std::vector<WitnessEvent> events;    // kept only for kBugFound
  std::vector<AccessEvent> accesses;
  std::uint64_t steps_executed = 0;
  std::uint64_t final_tick = 0;
  std::vector<Value> final_shared;
  int threads_created = 0;
  int active_threads = 0;  // created minus joined, at the end of the run
  int max_active_threads = 0;

  bool found(BugKind kind) const;
  const Finding* first(BugKind kind) const;
};

class InfeasibleSchedule : public std::runtime_error {
 public:
  InfeasibleSchedule(std::size_t position, const std::string& message)
      : std::runtime_error(message), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Runs `program` with nondet values taken from `inputs` (0 once exhausted)
// and delays drawn from `delay_seed`. A pure function of its arguments.
ExecOutcome run(const Program& program, std::span<const Value> inputs,
                std::uint64_t delay_seed, const ExecConfig& config);

// Runs with delays, the thread threshold and probabilistic exit disabled,
// executing one instruction of schedule[i] at step i. Once the schedule is
// consumed the run ends at the next scheduling point (reporting a deadlock or
// normal completion if that is what the point is). Throws InfeasibleSchedule
// when schedule[i] names a thread that cannot run at step i.
ExecOutcome run_schedule(const Program& program, std::span<const Value> inputs,
                         std::span<const int> schedule,
                         const ExecConfig& config);

}  // namespace ebf

#endif  // EBF_EXEC_H_
