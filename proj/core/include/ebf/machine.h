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

// Single-instruction stepping of a program state. The delay-driven run loop,
// the forced-schedule replayer and the bounded model checker all drive one of
// these; it owns instruction semantics and the bug detectors, but no
// scheduling policy.

#ifndef EBF_MACHINE_H_
#define EBF_MACHINE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ebf/exec.h"
#include "ebf/mir.h"
#include "ebf/race.h"

namespace ebf {

class Machine {
 public:
  enum class Poll : std::uint8_t {
    kRunnable,     // at least one thread may step
    kAllDone,      // every thread returned
    kDeadlock,     // live threads exist and all are blocked
    kAtomicStall,  // the atomic-region owner is blocked, others could run
  };

  enum class StepResult : std::uint8_t { kOk, kFatal, kAssumeFailed };

  Machine(const Program& program, const ExecConfig& config);

  int num_threads() const { return static_cast<int>(threads_.size()); }
  bool alive(int tid) const { return !threads_[tid].finished; }
  bool blocked(int tid) const;
  // Alive, not blocked, and not excluded by another thread's atomic region.
  bool runnable(int tid) const;
  Poll poll() const;
  int atomic_owner() const { return atomic_owner_; }
  const Instruction& next_instruction(int tid) const;
  bool next_is_nondet(int tid) const {
    return next_instruction(tid).op == Opcode::kNondet;
  }

  // Executes the next instruction of `tid`, which must be runnable. The first
  // overload takes nondet values from the input sequence.
  StepResult step(int tid);
  StepResult step(int tid, Value nondet);

  void set_inputs(std::span<const Value> inputs) {
    inputs_ = inputs;
    input_pos_ = 0;
  }

  // End-of-run detectors for kAllDone: thread and memory leaks.
  void report_completion();
  // Deadlock finding for kDeadlock (when the detector is enabled).
  bool report_deadlock();

  std::uint64_t tick() const { return tick_; }
  void set_tick(std::uint64_t t) { tick_ = t; }
  std::uint64_t wake_tick(int tid) const { return threads_[tid].wake_tick; }
  void set_wake_tick(int tid, std::uint64_t t) { threads_[tid].wake_tick = t; }

  int active_threads() const { return active_; }
  std::uint64_t steps() const { return steps_; }
  const std::vector<Finding>& findings() const { return findings_; }
  bool has_fatal() const { return fatal_; }
  const std::vector<Value>& shared() const { return shared_; }

  ExecOutcome finish(EndReason reason);

  // Canonical encoding of the semantic state (excluding time, trace and
  // findings) for explicit-state search.
  void encode_state(std::string& out) const;

 private:
  struct Thread {
    int kind = 0;
    int pc = 0;
    std::vector<Value> regs;
    std::vector<int> reg_addr;  // witness address ids
    bool finished = false;
    bool joined = false;
    std::uint64_t wake_tick = 0;
    int create_kind = -1;  // spawning site, for leak reports
    int create_pc = -1;
  };

  struct Block {
    std::vector<Value> cells;
    bool live = true;
    int kind = 0;
    int pc = 0;
    int addr = 0;
  };

  Location location(int kind, int pc) const;
  void add_finding(BugKind kind, int tid, std::string detail);
  void add_finding_at(BugKind kind, Location loc, std::string detail);
  StepResult fault(int tid, std::string detail);
  StepResult execute(int tid, const Value* nondet);
  void spawn(int kind, int parent, int create_kind, int create_pc);
  void release_atomic(int tid);
  void write_register(int tid, int reg, Value v, int line);
  void trace(AccessEvent::Kind kind, int tid, std::int64_t object);
  void edge(int kind, int from, int to);
  bool heap_check(int tid, Value handle, Value index, Block** block);

  const Program* program_;
  DetectorSet detectors_;
  bool record_witness_;
  bool record_accesses_;
  bool collect_coverage_;

  std::vector<Thread> threads_;
  std::vector<Value> shared_;
  std::vector<int> shared_addr_;
  std::vector<int> lock_owner_;
  std::vector<Block> heap_;
  int atomic_owner_ = -1;
  int active_ = 0;
  int max_active_ = 0;
  int next_addr_ = 0;
  std::uint64_t tick_ = 0;
  std::uint64_t steps_ = 0;
  std::span<const Value> inputs_;
  std::size_t input_pos_ = 0;

  bool race_on_;
  RaceDetector race_;

  std::vector<Finding> findings_;
  bool fatal_ = false;
  std::vector<std::uint64_t> coverage_;
  std::vector<WitnessEvent> events_;
  std::vector<AccessEvent> accesses_;
};

}  // namespace ebf

#endif  // EBF_MACHINE_H_
