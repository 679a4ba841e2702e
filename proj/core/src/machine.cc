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

#include "ebf/machine.h"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace ebf {

namespace {

constexpr Value kMaxAllocation = Value{1} << 20;
constexpr std::int64_t kHeapLocationTag = std::int64_t{1} << 62;

std::int64_t heap_location(Value handle, Value index) {
  return kHeapLocationTag | (handle << 32) | (index & 0xffffffff);
}

}  // namespace

Machine::Machine(const Program& program, const ExecConfig& config)
    : program_(&program),
      detectors_(config.detectors),
      record_witness_(config.record_witness),
      record_accesses_(config.record_accesses),
      collect_coverage_(config.collect_coverage),
      lock_owner_(program.mutexes.size(), -1),
      race_on_(config.detectors.has(Detector::kRace)),
      race_(race_on_ ? program.mutexes.size() + 1 : 0) {
  shared_.reserve(program.shared.size());
  for (const auto& var : program.shared) {
    shared_.push_back(var.init);
    if (record_witness_) {
      shared_addr_.push_back(next_addr_);
      events_.emplace_back(event::Decl{var.name, "global", next_addr_++});
    }
  }
  const int entry = program.entry_index();
  if (entry < 0) {
    throw std::invalid_argument("no entry thread '" + program.entry + "'");
  }
  spawn(entry, -1, -1, -1);
  if (race_on_) race_.start_thread(0);
}

void Machine::spawn(int kind, int parent, int create_kind, int create_pc) {
  Thread t;
  t.kind = kind;
  const ThreadKind& k = program_->threads[kind];
  t.regs.assign(k.registers.size(), 0);
  t.create_kind = create_kind;
  t.create_pc = create_pc;
  if (parent >= 0) t.wake_tick = tick_;
  if (record_witness_) {
    for (const auto& reg : k.registers) {
      t.reg_addr.push_back(next_addr_);
      events_.emplace_back(event::Decl{reg, k.name, next_addr_++});
    }
  }
  threads_.push_back(std::move(t));
}

const Instruction& Machine::next_instruction(int tid) const {
  const Thread& t = threads_[tid];
  return program_->threads[t.kind].body[t.pc];
}

bool Machine::blocked(int tid) const {
  const Thread& t = threads_[tid];
  if (t.finished) return false;
  const Instruction& ins = program_->threads[t.kind].body[t.pc];
  if (ins.op == Opcode::kLock) return lock_owner_[ins.target] != -1;
  if (ins.op == Opcode::kJoin) {
    const Value id = t.regs[ins.handle];
    if (id < 1 || id >= static_cast<Value>(threads_.size())) return false;
    const Thread& target = threads_[id];
    return !target.joined && !target.finished;
  }
  return false;
}

bool Machine::runnable(int tid) const {
  if (tid < 0 || tid >= num_threads()) return false;
  if (threads_[tid].finished || blocked(tid)) return false;
  return atomic_owner_ < 0 || atomic_owner_ == tid;
}

Machine::Poll Machine::poll() const {
  bool any_alive = false;
  bool other_unblocked = false;
  for (int t = 0; t < num_threads(); ++t) {
    if (threads_[t].finished) continue;
    any_alive = true;
    if (t != atomic_owner_ && !blocked(t)) other_unblocked = true;
  }
  if (!any_alive) return Poll::kAllDone;
  if (atomic_owner_ >= 0) {
    if (!blocked(atomic_owner_)) return Poll::kRunnable;
    return other_unblocked ? Poll::kAtomicStall : Poll::kDeadlock;
  }
  return other_unblocked ? Poll::kRunnable : Poll::kDeadlock;
}

Location Machine::location(int kind, int pc) const {
  const ThreadKind& k = program_->threads[kind];
  return Location{k.name, k.line_of(static_cast<std::size_t>(pc))};
}

void Machine::add_finding_at(BugKind kind, Location loc, std::string detail) {
  Finding f;
  f.kind = kind;
  f.location = std::move(loc);
  f.tick = tick_;
  f.step = steps_ == 0 ? 0 : steps_ - 1;
  f.detail = std::move(detail);
  findings_.push_back(std::move(f));
}

void Machine::add_finding(BugKind kind, int tid, std::string detail) {
  const Thread& t = threads_[tid];
  add_finding_at(kind, location(t.kind, t.pc), std::move(detail));
}

Machine::StepResult Machine::fault(int tid, std::string detail) {
  if (!detectors_.has(Detector::kMemory)) return StepResult::kAssumeFailed;
  add_finding(BugKind::kMemorySafety, tid, std::move(detail));
  fatal_ = true;
  return StepResult::kFatal;
}

void Machine::write_register(int tid, int reg, Value v, int line) {
  Thread& t = threads_[tid];
  t.regs[reg] = v;
  if (record_witness_) {
    events_.emplace_back(event::Store{t.reg_addr[reg], line,
                                      program_->threads[t.kind].name, v});
  }
}

void Machine::trace(AccessEvent::Kind kind, int tid, std::int64_t object) {
  if (record_accesses_) {
    accesses_.push_back(AccessEvent{kind, tid, object, steps_ - 1});
  }
}

void Machine::edge(int kind, int from, int to) {
  if (collect_coverage_) {
    coverage_.push_back(CoverageEdge{static_cast<std::uint32_t>(kind),
                                     static_cast<std::uint32_t>(from),
                                     static_cast<std::uint32_t>(to)}
                            .packed());
  }
}

void Machine::release_atomic(int tid) {
  atomic_owner_ = -1;
  if (race_on_) race_.on_release(tid, static_cast<int>(lock_owner_.size()));
  trace(AccessEvent::Kind::kRelease, tid, -1);
}

bool Machine::heap_check(int tid, Value handle, Value index, Block** block) {
  if (handle < 1 || handle > static_cast<Value>(heap_.size())) {
    fault(tid, "access through invalid heap handle");
    return false;
  }
  Block& b = heap_[handle - 1];
  if (!b.live) {
    fault(tid, "use after free of heap" + std::to_string(handle));
    return false;
  }
  if (index < 0 || index >= static_cast<Value>(b.cells.size())) {
    fault(tid, "out-of-bounds index " + std::to_string(index) + " into heap" +
                   std::to_string(handle));
    return false;
  }
  *block = &b;
  return true;
}

Machine::StepResult Machine::step(int tid) { return execute(tid, nullptr); }

Machine::StepResult Machine::step(int tid, Value nondet) {
  return execute(tid, &nondet);
}

Machine::StepResult Machine::execute(int tid, const Value* nondet) {
  assert(runnable(tid));
  const int kind_index = threads_[tid].kind;
  const ThreadKind& kind = program_->threads[kind_index];
  const int pc = threads_[tid].pc;
  const Instruction& ins = kind.body[pc];
  const int line = kind.line_of(pc);
  ++steps_;
  if (record_witness_) events_.emplace_back(event::Sched{tick_, tid});

  auto regs = [this, tid]() -> std::vector<Value>& {
    return threads_[tid].regs;
  };
  auto advance = [this, tid]() { ++threads_[tid].pc; };

  switch (ins.op) {
    case Opcode::kAssign:
      write_register(tid, ins.dest, evaluate(ins.value, regs()), line);
      advance();
      break;

    case Opcode::kLoad: {
      const Value v = shared_[ins.target];
      if (race_on_ && race_.on_read(tid, ins.target)) {
        add_finding(BugKind::kDataRace, tid,
                    "read of '" + ins.symbol + "' races with a write");
      }
      trace(AccessEvent::Kind::kRead, tid, ins.target);
      write_register(tid, ins.dest, v, line);
      advance();
      break;
    }

    case Opcode::kStore: {
      const Value v = evaluate(ins.value, regs());
      shared_[ins.target] = v;
      if (race_on_ && race_.on_write(tid, ins.target)) {
        add_finding(BugKind::kDataRace, tid,
                    "write of '" + ins.symbol + "' races with another access");
      }
      trace(AccessEvent::Kind::kWrite, tid, ins.target);
      if (record_witness_) {
        events_.emplace_back(
            event::Store{shared_addr_[ins.target], line, kind.name, v});
      }
      advance();
      break;
    }

    case Opcode::kNondet: {
      Value v = 0;
      if (nondet != nullptr) {
        v = *nondet;
      } else if (input_pos_ < inputs_.size()) {
        v = inputs_[input_pos_++];
      }
      if (record_witness_) events_.emplace_back(event::Input{v});
      write_register(tid, ins.dest, v, line);
      advance();
      break;
    }

    case Opcode::kCreate: {
      const int child = num_threads();
      ++active_;
      max_active_ = std::max(max_active_, active_);
      spawn(ins.target, tid, kind_index, pc);
      if (race_on_) race_.on_create(tid, child);
      trace(AccessEvent::Kind::kCreate, tid, child);
      if (record_witness_) events_.emplace_back(event::Create{tid, child});
      write_register(tid, ins.dest, child, line);
      advance();
      break;
    }

    case Opcode::kJoin: {
      const Value id = regs()[ins.handle];
      if (id < 1 || id >= static_cast<Value>(threads_.size())) {
        return fault(tid, "join of unknown thread id " + std::to_string(id));
      }
      if (threads_[id].joined) {
        return fault(tid, "thread t" + std::to_string(id) + " joined twice");
      }
      threads_[id].joined = true;
      --active_;
      if (race_on_) race_.on_join(tid, static_cast<int>(id));
      trace(AccessEvent::Kind::kJoin, tid, id);
      if (record_witness_) {
        events_.emplace_back(event::Join{tid, static_cast<int>(id)});
      }
      advance();
      break;
    }

    case Opcode::kLock:
      lock_owner_[ins.target] = tid;
      if (race_on_) race_.on_acquire(tid, ins.target);
      trace(AccessEvent::Kind::kAcquire, tid, ins.target);
      advance();
      break;

    case Opcode::kUnlock:
      if (lock_owner_[ins.target] != tid) {
        return fault(tid, "unlock of mutex '" + ins.symbol + "' not held");
      }
      lock_owner_[ins.target] = -1;
      if (race_on_) race_.on_release(tid, ins.target);
      trace(AccessEvent::Kind::kRelease, tid, ins.target);
      advance();
      break;

    case Opcode::kAtomicBegin:
      if (atomic_owner_ == tid) return fault(tid, "nested atomic region");
      atomic_owner_ = tid;
      if (race_on_) {
        race_.on_acquire(tid, static_cast<int>(lock_owner_.size()));
      }
      trace(AccessEvent::Kind::kAcquire, tid, -1);
      advance();
      break;

    case Opcode::kAtomicEnd:
      if (atomic_owner_ != tid) {
        return fault(tid, "atomic_end outside an atomic region");
      }
      release_atomic(tid);
      advance();
      break;

    case Opcode::kAssume:
      if (!evaluate(ins.cond, regs())) return StepResult::kAssumeFailed;
      advance();
      break;

    case Opcode::kAssert:
      if (!evaluate(ins.cond, regs())) {
        if (!detectors_.has(Detector::kAssertion)) {
          return StepResult::kAssumeFailed;
        }
        add_finding(BugKind::kAssertionFailure, tid,
                    "assert " + to_text(ins.cond, kind));
        fatal_ = true;
        return StepResult::kFatal;
      }
      advance();
      break;

    case Opcode::kError:
      if (!detectors_.has(Detector::kAssertion)) {
        return StepResult::kAssumeFailed;
      }
      add_finding(BugKind::kReachability, tid, "error reached");
      fatal_ = true;
      return StepResult::kFatal;

    case Opcode::kGoto:
      edge(kind_index, pc, ins.target);
      threads_[tid].pc = ins.target;
      break;

    case Opcode::kBranch: {
      const int next = evaluate(ins.cond, regs()) ? ins.target : pc + 1;
      edge(kind_index, pc, next);
      threads_[tid].pc = next;
      break;
    }

    case Opcode::kAlloc: {
      const Value size = evaluate(ins.value, regs());
      if (size <= 0 || size > kMaxAllocation) {
        return fault(tid, "invalid allocation size " + std::to_string(size));
      }
      Block b;
      b.cells.assign(static_cast<std::size_t>(size), 0);
      b.kind = kind_index;
      b.pc = pc;
      const Value handle = static_cast<Value>(heap_.size()) + 1;
      if (record_witness_) {
        b.addr = next_addr_++;
        events_.emplace_back(
            event::Decl{"heap" + std::to_string(handle), kind.name, b.addr});
      }
      heap_.push_back(std::move(b));
      write_register(tid, ins.dest, handle, line);
      advance();
      break;
    }

    case Opcode::kFree: {
      const Value h = regs()[ins.handle];
      if (h < 1 || h > static_cast<Value>(heap_.size())) {
        return fault(tid, "free of invalid heap handle " + std::to_string(h));
      }
      if (!heap_[h - 1].live) {
        return fault(tid, "double free of heap" + std::to_string(h));
      }
      heap_[h - 1].live = false;
      advance();
      break;
    }

    case Opcode::kHeapLoad: {
      const Value h = regs()[ins.handle];
      const Value idx = evaluate(ins.index, regs());
      Block* b = nullptr;
      if (!heap_check(tid, h, idx, &b)) {
        return fatal_ ? StepResult::kFatal : StepResult::kAssumeFailed;
      }
      const Value v = b->cells[idx];
      const std::int64_t loc = heap_location(h, idx);
      if (race_on_ && race_.on_read(tid, loc)) {
        add_finding(BugKind::kDataRace, tid, "heap read races with a write");
      }
      trace(AccessEvent::Kind::kHeapRead, tid, loc);
      write_register(tid, ins.dest, v, line);
      advance();
      break;
    }

    case Opcode::kHeapStore: {
      const Value h = regs()[ins.handle];
      const Value idx = evaluate(ins.index, regs());
      const Value v = evaluate(ins.value, regs());
      Block* b = nullptr;
      if (!heap_check(tid, h, idx, &b)) {
        return fatal_ ? StepResult::kFatal : StepResult::kAssumeFailed;
      }
      b->cells[idx] = v;
      const std::int64_t loc = heap_location(h, idx);
      if (race_on_ && race_.on_write(tid, loc)) {
        add_finding(BugKind::kDataRace, tid,
                    "heap write races with another access");
      }
      trace(AccessEvent::Kind::kHeapWrite, tid, loc);
      if (record_witness_) {
        events_.emplace_back(event::Store{b->addr, line, kind.name, v});
      }
      advance();
      break;
    }

    case Opcode::kReturn:
      threads_[tid].finished = true;
      if (atomic_owner_ == tid) release_atomic(tid);
      trace(AccessEvent::Kind::kExit, tid, tid);
      break;
  }
  return StepResult::kOk;
}

void Machine::report_completion() {
  if (detectors_.has(Detector::kThreadLeak)) {
    for (int t = 1; t < num_threads(); ++t) {
      if (threads_[t].joined) continue;
      const Thread& th = threads_[t];
      add_finding_at(BugKind::kThreadLeak, location(th.create_kind, th.create_pc),
                     "t" + std::to_string(t) + " (" +
                         program_->threads[th.kind].name + ") never joined");
    }
  }
  if (detectors_.has(Detector::kMemory)) {
    for (std::size_t h = 0; h < heap_.size(); ++h) {
      if (!heap_[h].live) continue;
      add_finding_at(BugKind::kMemoryLeak, location(heap_[h].kind, heap_[h].pc),
                     "heap" + std::to_string(h + 1) + " never freed");
    }
  }
}

bool Machine::report_deadlock() {
  if (!detectors_.has(Detector::kDeadlock)) return false;
  int first = -1;
  std::string who;
  for (int t = 0; t < num_threads(); ++t) {
    if (threads_[t].finished) continue;
    if (first < 0) first = t;
    if (!who.empty()) who += ",";
    who += "t" + std::to_string(t);
  }
  if (first < 0) return false;
  add_finding(BugKind::kDeadlock, first, "blocked forever: " + who);
  return true;
}

ExecOutcome Machine::finish(EndReason reason) {
  ExecOutcome out;
  out.end = reason;
  out.findings = findings_;
  if (!findings_.empty()) {
    out.status = ExecStatus::kBugFound;
  } else if (reason == EndReason::kCompleted) {
    out.status = ExecStatus::kCompleted;
  } else if (reason == EndReason::kStepBudget) {
    out.status = ExecStatus::kBudgetExceeded;
  } else {
    out.status = ExecStatus::kExhausted;
  }
  std::sort(coverage_.begin(), coverage_.end());
  coverage_.erase(std::unique(coverage_.begin(), coverage_.end()),
                  coverage_.end());
  out.coverage.reserve(coverage_.size());
  for (auto p : coverage_) out.coverage.push_back(CoverageEdge::unpack(p));
  if (record_witness_ && out.status == ExecStatus::kBugFound) {
    for (const auto& f : findings_) {
      events_.emplace_back(event::Finding{f.kind, f.location, f.tick});
    }
    out.events = std::move(events_);
  }
  out.accesses = std::move(accesses_);
  out.steps_executed = steps_;
  out.final_tick = tick_;
  out.final_shared = shared_;
  out.threads_created = num_threads() - 1;
  out.active_threads = active_;
  out.max_active_threads = max_active_;
  return out;
}

void Machine::encode_state(std::string& out) const {
  auto put = [&out](std::uint64_t v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof v);
  };
  put(threads_.size());
  for (const auto& t : threads_) {
    put(static_cast<std::uint64_t>(t.kind) | (std::uint64_t(t.pc) << 16) |
        (std::uint64_t(t.finished) << 48) | (std::uint64_t(t.joined) << 49));
    for (Value r : t.regs) put(static_cast<std::uint64_t>(r));
  }
  for (Value v : shared_) put(static_cast<std::uint64_t>(v));
  for (int o : lock_owner_) put(static_cast<std::uint64_t>(o));
  put(static_cast<std::uint64_t>(atomic_owner_));
  put(heap_.size());
  for (const auto& b : heap_) {
    put(b.live ? b.cells.size() : ~std::uint64_t{0});
    if (b.live) {
      for (Value c : b.cells) put(static_cast<std::uint64_t>(c));
    }
  }
  put(static_cast<std::uint64_t>(active_));
  if (race_on_) race_.encode(out);
}

}  // namespace ebf
