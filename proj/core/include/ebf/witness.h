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

// Crash reports: the ordered event log an interpreter run emits, retained only
// for runs that found a bug, plus a native line-oriented file format and a
// schedule-forcing replayer.
//
// File format (`witness_<runid>.txt`):
//
//   run <id>
//   program <16 hex digits>
//   [config <free text>]
//   DECL <name> <function> #<addr>
//   STORE #<addr> <line> <function> <value>
//   SCHED <tick> t<thread>
//   INPUT <value>
//   CREATE t<parent> t<child>
//   JOIN t<parent> t<child>
//   FINDING <BugKind> <function>:<line> <tick>
//
// SCHED is emitted once per executed instruction, so the SCHED lines are the
// complete realized schedule.

#ifndef EBF_WITNESS_H_
#define EBF_WITNESS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ebf/finding.h"
#include "ebf/mir.h"

namespace ebf {

namespace event {

struct Decl {
  std::string name;
  std::string function;
  int addr = 0;
  bool operator==(const Decl&) const = default;
};

struct Store {
  int addr = 0;
  int line = 0;
  std::string function;
  Value value = 0;
  bool operator==(const Store&) const = default;
};

struct Sched {
  std::uint64_t tick = 0;
  int thread = 0;
  bool operator==(const Sched&) const = default;
};

struct Input {
  Value value = 0;
  bool operator==(const Input&) const = default;
};

struct Create {
  int parent = 0;
  int child = 0;
  bool operator==(const Create&) const = default;
};

struct Join {
  int parent = 0;
  int child = 0;
  bool operator==(const Join&) const = default;
};

struct Finding {
  BugKind kind = BugKind::kAssertionFailure;
  Location location;
  std::uint64_t tick = 0;
  bool operator==(const Finding&) const = default;
};

}  // namespace event

using WitnessEvent = std::variant<event::Decl, event::Store, event::Sched,
                                  event::Input, event::Create, event::Join,
                                  event::Finding>;

struct CrashReport {
  std::string run_id;
  std::string program_hash;  // fingerprint_hex of the program
  std::string config;        // free-form echo, single line
  std::vector<WitnessEvent> events;

  std::vector<event::Finding> findings() const;
  std::vector<int> schedule() const;
  std::vector<Value> inputs() const;
  bool operator==(const CrashReport&) const = default;
};

class WitnessFormatError : public std::runtime_error {
 public:
  WitnessFormatError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize(const CrashReport& report);
// Throws WitnessFormatError naming the first offending line.
CrashReport deserialize(std::string_view text);

// Empty when the report is well-formed (DECL before STORE, unique addresses,
// trailing FINDING); otherwise a description of the first problem.
std::optional<std::string> check_well_formed(const CrashReport& report);

struct ExecOutcome;
struct ExecConfig;

// Keeps the event log of a bug-finding run; every other outcome discards it.
std::optional<CrashReport> record(const Program& program,
                                  const ExecOutcome& outcome,
                                  std::string run_id, std::string config = {});

// Re-executes the recorded schedule and inputs with delays disabled.
// Throws ReplayError on fingerprint mismatch or an infeasible schedule.
ExecOutcome replay(const Program& program, const CrashReport& report,
                   const ExecConfig& config);
ExecOutcome replay(const Program& program, const CrashReport& report);

// True when the replayed outcome reproduces every FINDING of the report by
// (kind, location), in order.
bool reproduces(const CrashReport& report, const ExecOutcome& outcome);

}  // namespace ebf

#endif  // EBF_WITNESS_H_
