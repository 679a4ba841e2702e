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


#include "ebf/exec.h"

#include <algorithm>
#include <charconv>
#include <limits>

#include "ebf/machine.h"
#include "ebf/rng.h"

namespace ebf {

namespace {

struct DetectorName {
  Detector detector;
  std::string_view name;
};

constexpr DetectorName kDetectorNames[] = {
    {Detector::kRace, "race"},
    {Detector::kDeadlock, "deadlock"},
    {Detector::kThreadLeak, "thread_leak"},
    {Detector::kMemory, "memory"},
    {Detector::kAssertion, "assertion"},
};

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

}  // namespace

bool DetectorSet::reports(BugKind kind) const {
  switch (kind) {
    case BugKind::kReachability:
    case BugKind::kAssertionFailure:
      return has(Detector::kAssertion);
    case BugKind::kDataRace:
      return has(Detector::kRace);
    case BugKind::kDeadlock:
      return has(Detector::kDeadlock);
    case BugKind::kThreadLeak:
      return has(Detector::kThreadLeak);
    case BugKind::kMemorySafety:
    case BugKind::kMemoryLeak:
      return has(Detector::kMemory);
  }
  return false;
}

std::string DetectorSet::str() const {
  std::string out;
  for (const auto& [d, name] : kDetectorNames) {
    if (!has(d)) continue;
    if (!out.empty()) out += ',';
    out += name;
  }
  return out.empty() ? "none" : out;
}

std::optional<DetectorSet> DetectorSet::parse(std::string_view text) {
  if (text == "all") return all();
  if (text == "none") return none();
  DetectorSet set;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    bool known = false;
    for (const auto& [d, name] : kDetectorNames) {
      if (item == name) {
        set = set.with(d);
        known = true;
      }
    }
    if (!known) return std::nullopt;
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    if (text.empty()) return std::nullopt;
  }
  return set;
}

void ExecConfig::validate() const {
  if (thread_threshold < 1) {
    throw std::invalid_argument("thread_threshold must be positive");
  }
  if (!(exit_prob >= 0.0 && exit_prob <= 1.0)) {
    throw std::invalid_argument("exit_prob must lie in [0, 1]");
  }
  if (atomic_wait_bound && *atomic_wait_bound == 0) {
    throw std::invalid_argument("atomic_wait_bound must be positive");
  }
  if (step_budget == 0) {
    throw std::invalid_argument("step_budget must be positive");
  }
}

std::string ExecConfig::echo() const {
  return "thread_threshold=" + std::to_string(thread_threshold) +
         " delay_max=" + std::to_string(delay_max) +
         " exit_prob=" + format_double(exit_prob) +
         " atomic_wait_bound=" + std::to_string(wait_bound()) +
         " step_budget=" + std::to_string(step_budget) +
         " detectors=" + detectors.str();
}

std::string_view to_string(ExecStatus status) {
  switch (status) {
    case ExecStatus::kCompleted:
      return "Completed";
    case ExecStatus::kBugFound:
      return "BugFound";
    case ExecStatus::kExhausted:
      return "Exhausted";
    case ExecStatus::kBudgetExceeded:
      return "BudgetExceeded";
  }
  return "?";
}

std::string_view to_string(EndReason reason) {
  switch (reason) {
    case EndReason::kCompleted:
      return "completed";
    case EndReason::kFatalFinding:
      return "fatal-finding";
    case EndReason::kDeadlock:
      return "deadlock";
    case EndReason::kThreadLimit:
      return "thread-limit";
    case EndReason::kProbabilisticExit:
      return "probabilistic-exit";
    case EndReason::kAtomicTimeout:
      return "atomic-timeout";
    case EndReason::kAssumeFailed:
      return "assume-failed";
    case EndReason::kStepBudget:
      return "step-budget";
    case EndReason::kScheduleEnd:
      return "schedule-end";
  }
  return "?";
}

bool ExecOutcome::found(BugKind kind) const { return first(kind) != nullptr; }

const Finding* ExecOutcome::first(BugKind kind) const {
  for (const auto& f : findings) {
    if (f.kind == kind) return &f;
  }
  return nullptr;
}

ExecOutcome run(const Program& program, std::span<const Value> inputs,
                std::uint64_t delay_seed, const ExecConfig& config) {
  Machine m(program, config);
  m.set_inputs(inputs);
  SplitMix64 rng(delay_seed);
  const int n_max = config.thread_threshold;

  for (;;) {
    if (m.steps() >= config.step_budget) return m.finish(EndReason::kStepBudget);

    switch (m.poll()) {
      case Machine::Poll::kAllDone:
        m.report_completion();
        return m.finish(EndReason::kCompleted);
      case Machine::Poll::kDeadlock:
        m.report_deadlock();
        return m.finish(EndReason::kDeadlock);
      case Machine::Poll::kAtomicStall:
        // Everyone else waits for the owner, which cannot make progress.
        m.set_tick(m.tick() + config.wait_bound());
        return m.finish(EndReason::kAtomicTimeout);
      case Machine::Poll::kRunnable:
        break;
    }

    int tid = m.atomic_owner();
    if (tid >= 0) {
      if (m.wake_tick(tid) > m.tick()) m.set_tick(m.wake_tick(tid));
    } else {
      std::uint64_t earliest = std::numeric_limits<std::uint64_t>::max();
      for (int t = 0; t < m.num_threads(); ++t) {
        if (!m.runnable(t)) continue;
        if (m.wake_tick(t) <= m.tick()) {
          tid = t;
          break;
        }
        earliest = std::min(earliest, m.wake_tick(t));
      }
      if (tid < 0) {
        m.set_tick(earliest);
        continue;
      }
    }

    switch (m.step(tid)) {
      case Machine::StepResult::kFatal:
        return m.finish(EndReason::kFatalFinding);
      case Machine::StepResult::kAssumeFailed:
        return m.finish(EndReason::kAssumeFailed);
      case Machine::StepResult::kOk:
        break;
    }

    // Delay hook. Skipped for a finished thread and inside atomic regions.
    if (!m.alive(tid) || m.atomic_owner() == tid) continue;
    if (m.active_threads() > n_max) return m.finish(EndReason::kThreadLimit);
    if (rng.bernoulli(config.exit_prob)) {
      return m.finish(EndReason::kProbabilisticExit);
    }
    const std::uint64_t d = rng.uniform_inclusive(config.delay_max);
    m.set_wake_tick(tid, m.tick() + d);
  }
}

ExecOutcome run_schedule(const Program& program, std::span<const Value> inputs,
                         std::span<const int> schedule,
                         const ExecConfig& config) {
  Machine m(program, config);
  m.set_inputs(inputs);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (m.steps() >= config.step_budget) {
      return m.finish(EndReason::kStepBudget);
    }
    const int tid = schedule[i];
    if (!m.runnable(tid)) {
      throw InfeasibleSchedule(
          i, "schedule step " + std::to_string(i) + ": thread t" +
                 std::to_string(tid) + " cannot run");
    }
    switch (m.step(tid)) {
      case Machine::StepResult::kFatal:
        return m.finish(EndReason::kFatalFinding);
      case Machine::StepResult::kAssumeFailed:
        return m.finish(EndReason::kAssumeFailed);
      case Machine::StepResult::kOk:
        break;
    }
  }
  switch (m.poll()) {
    case Machine::Poll::kAllDone:
      m.report_completion();
      return m.finish(EndReason::kCompleted);
    case Machine::Poll::kDeadlock:
      m.report_deadlock();
      return m.finish(EndReason::kDeadlock);
    case Machine::Poll::kAtomicStall:
      return m.finish(EndReason::kAtomicTimeout);
    case Machine::Poll::kRunnable:
      break;
  }
  return m.finish(EndReason::kScheduleEnd);
}

}  // namespace ebf
