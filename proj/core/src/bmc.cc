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


#include "ebf/bmc.h"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "ebf/machine.h"

namespace ebf {

namespace {

using Clock = std::chrono::steady_clock;

struct Summary {
  bool cut = false;
  int max_len = 0;  // longest path below the node (uncut subtrees only)
  int max_sw = 0;   // most context switches along a path below the node
};

struct Entry {
  int k_rem = 0;
  int c_rem = 0;
  bool done = false;
  Summary summary;
};

class Search {
 public:
  Search(const Program& program, const BmcConfig& config)
      : program_(program),
        config_(config),
        domain_(effective_domain(program, config)),
        start_(Clock::now()) {
    exec_.detectors = config.detectors;
    exec_.collect_coverage = false;
    exec_.record_witness = false;
    exec_.step_budget = std::numeric_limits<std::uint64_t>::max();
  }

  void run() {
    Machine root(program_, exec_);
    dfs(root, -1, config_.k, config_.C);
  }

  bool bug() const { return bug_; }
  bool stopped() const { return stopped_; }
  bool cut() const { return cut_; }
  const Counterexample& counterexample() const { return cex_; }
  const std::vector<Finding>& findings() const { return findings_; }
  std::uint64_t states() const { return states_; }
  std::uint64_t hash_hits() const { return hash_hits_; }
  std::size_t domain_size() const { return domain_.size(); }
  const ExecConfig& exec_config() const { return exec_; }

 private:
  bool out_of_budget() {
    if (config_.max_states && states_ >= *config_.max_states) return true;
    if (config_.max_time && (states_ & 255) == 0 &&
        Clock::now() - start_ >= *config_.max_time) {
      return true;
    }
    return false;
  }

  void report(const Machine& m) {
    bug_ = true;
    findings_ = m.findings();
    cex_ = Counterexample{inputs_, schedule_, m.findings().front()};
  }

  Summary dfs(Machine& m, int last, int k_rem, int c_rem) {
    if (bug_ || stopped_) return {};
    if (out_of_budget()) {
      stopped_ = true;
      return {};
    }
    ++states_;

    switch (m.poll()) {
      case Machine::Poll::kAllDone:
        m.report_completion();
        if (!m.findings().empty()) report(m);
        return {};
      case Machine::Poll::kDeadlock:
        if (m.report_deadlock()) report(m);
        return {};
      case Machine::Poll::kAtomicStall:
        return {};
      case Machine::Poll::kRunnable:
        break;
    }
    if (k_rem == 0) {
      cut_ = true;
      return {true, 0, 0};
    }

    std::string key;
    if (config_.state_hashing) {
      m.encode_state(key);
      const std::int32_t l = last;
      key.append(reinterpret_cast<const char*>(&l), sizeof l);
      auto it = table_.find(key);
      if (it != table_.end()) {
        const Entry& e = it->second;
        if (!e.done) {
          // Back on the current path: the cycle can be unrolled until a
          // bound cuts it.
          ++hash_hits_;
          cut_ = true;
          return {true, 0, 0};
        }
        if (!e.summary.cut) {
          ++hash_hits_;
          Summary s = e.summary;
          if (s.max_len > k_rem || s.max_sw > c_rem) {
            s.cut = true;
            cut_ = true;
          }
          return s;
        }
        if (k_rem <= e.k_rem && c_rem <= e.c_rem) {
          ++hash_hits_;
          cut_ = true;
          return {true, 0, 0};
        }
      }
      table_[key] = Entry{k_rem, c_rem, false, {}};
    }

    Summary total;
    for (int tid = 0; tid < m.num_threads() && !bug_ && !stopped_; ++tid) {
      if (!m.runnable(tid)) continue;
      const bool sw = last >= 0 && tid != last;
      if (sw && c_rem == 0) {
        cut_ = true;
        total.cut = true;
        continue;
      }
      const bool nondet = m.next_is_nondet(tid);
      const std::size_t choices = nondet ? domain_.size() : 1;
      for (std::size_t v = 0; v < choices && !bug_ && !stopped_; ++v) {
        Machine child = m;
        schedule_.push_back(tid);
        if (nondet) inputs_.push_back(domain_[v]);
        const auto r = nondet ? child.step(tid, domain_[v]) : child.step(tid);
        Summary sub;
        if (r == Machine::StepResult::kFatal || !child.findings().empty()) {
          report(child);
        } else if (r == Machine::StepResult::kOk) {
          sub = dfs(child, tid, k_rem - 1, c_rem - (sw ? 1 : 0));
        }
        total.cut = total.cut || sub.cut;
        total.max_len = std::max(total.max_len, 1 + sub.max_len);
        total.max_sw = std::max(total.max_sw, (sw ? 1 : 0) + sub.max_sw);
        if (nondet) inputs_.pop_back();
        schedule_.pop_back();
      }
    }

    if (config_.state_hashing && !bug_ && !stopped_) {
      table_[key] = Entry{k_rem, c_rem, true, total};
    }
    return total;
  }

  const Program& program_;
  const BmcConfig& config_;
  ExecConfig exec_;
  std::vector<Value> domain_;
  Clock::time_point start_;

  std::unordered_map<std::string, Entry> table_;
  std::vector<int> schedule_;
  std::vector<Value> inputs_;
  std::uint64_t states_ = 0;
  std::uint64_t hash_hits_ = 0;
  bool bug_ = false;
  bool stopped_ = false;
  bool cut_ = false;
  Counterexample cex_;
  std::vector<Finding> findings_;
};

void add_constants(const Expr& e, std::vector<Value>& out) {
  for (const auto& t : e.terms) {
    if (t.is_register) continue;
    out.push_back(t.constant);
    if (t.constant != std::numeric_limits<Value>::min()) {
      out.push_back(t.constant - 1);
    }
    if (t.constant != std::numeric_limits<Value>::max()) {
      out.push_back(t.constant + 1);
    }
  }
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kSafe:
      return "Safe";
    case Verdict::kBug:
      return "Bug";
    case Verdict::kUnknown:
      return "Unknown";
  }
  return "?";
}

void BmcConfig::validate() const {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (C < 1) throw std::invalid_argument("C must be at least 1");
  if (input_domain.empty()) {
    throw std::invalid_argument("input domain must not be empty");
  }
}

std::vector<Value> effective_domain(const Program& program,
                                    const BmcConfig& config) {
  std::vector<Value> out = config.input_domain;
  if (config.auto_domain) {
    for (const auto& kind : program.threads) {
      for (const auto& ins : kind.body) {
        if (ins.op == Opcode::kAssume || ins.op == Opcode::kAssert ||
            ins.op == Opcode::kBranch) {
          add_constants(ins.cond.lhs, out);
          add_constants(ins.cond.rhs, out);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

EngineVerdict bmc_check(const Program& program, const BmcConfig& config,
                        BmcStats* stats) {
  config.validate();
  const auto start = Clock::now();
  Search search(program, config);
  search.run();

  EngineVerdict v;
  v.engine = "bmc";
  v.work = search.states();
  if (search.bug()) {
    v.verdict = Verdict::kBug;
    v.counterexample = search.counterexample();
    v.findings = search.findings();
    ExecConfig rec = search.exec_config();
    rec.record_witness = true;
    const auto& cex = *v.counterexample;
    const ExecOutcome replayed =
        run_schedule(program, cex.inputs, cex.schedule, rec);
    std::string echo = "engine=bmc k=" + std::to_string(config.k) +
                       " C=" + std::to_string(config.C) +
                       " detectors=" + config.detectors.str();
    v.witness = record(program, replayed, "bmc", std::move(echo));
    if (!v.witness || !reproduces(*v.witness, replayed) ||
        !replayed.found(cex.finding.kind)) {
      v.note = "counterexample did not replay";
    }
  } else if (search.stopped()) {
    v.verdict = Verdict::kUnknown;
    v.note = "search budget exhausted";
  } else if (search.cut()) {
    v.verdict = Verdict::kUnknown;
    v.note = "bounds reached (k=" + std::to_string(config.k) +
             ", C=" + std::to_string(config.C) + ")";
  } else {
    v.verdict = Verdict::kSafe;
  }
  v.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (stats != nullptr) {
    stats->states = search.states();
    stats->hash_hits = search.hash_hits();
    stats->cut = search.cut();
    stats->out_of_budget = search.stopped();
    stats->domain_size = search.domain_size();
  }
  return v;
}

FuzzSeed counterexample_to_seed(const Counterexample& cex, SplitMix64& rng) {
  return FuzzSeed::encode(cex.inputs, rng.next());
}

EngineVerdict BmcEngine::check(const Program& program,
                               std::chrono::milliseconds budget) {
  BmcConfig config = config_;
  if (!config.max_time || *config.max_time > budget) config.max_time = budget;
  try {
    return bmc_check(program, config);
  } catch (const std::exception& e) {
    EngineVerdict v;
    v.engine = "bmc";
    v.note = std::string("engine error: ") + e.what();
    return v;
  }
}

}  // namespace ebf
