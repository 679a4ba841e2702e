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


#include "ebf/gbf.h"

#include <algorithm>
#include <set>
#include <thread>
#include <utility>

namespace ebf {

namespace {

using Clock = std::chrono::steady_clock;

FuzzSeed extend(const FuzzSeed& seed, SplitMix64& rng) {
  FuzzSeed out = seed;
  const std::size_t at =
      out.bytes.size() >= kLaneBytes ? out.bytes.size() - kLaneBytes : 0;
  const std::uint64_t r = rng.next();
  std::uint8_t fresh[kLaneBytes];
  for (std::size_t b = 0; b < kLaneBytes; ++b) {
    fresh[b] = static_cast<std::uint8_t>(r >> (8 * b));
  }
  out.bytes.insert(out.bytes.begin() + static_cast<std::ptrdiff_t>(at), fresh,
                   fresh + kLaneBytes);
  return out;
}

FuzzSeed truncate(const FuzzSeed& seed) {
  FuzzSeed out = seed;
  const std::size_t end = out.bytes.size() - kLaneBytes;
  out.bytes.erase(out.bytes.begin() + static_cast<std::ptrdiff_t>(end - kLaneBytes),
                  out.bytes.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

void process_coverage(EdgeSet& global, const std::vector<CoverageEdge>& run,
                      bool& fresh) {
  for (const auto& e : run) {
    if (global.insert(e.packed()).second) fresh = true;
  }
}

}  // namespace

FuzzSeed apply_mutation(const FuzzSeed& seed, Mutation m, SplitMix64& rng) {
  const std::size_t size = seed.bytes.size();
  const std::size_t full_lanes = size / kLaneBytes;
  if (size == 0) return extend(seed, rng);
  FuzzSeed out = seed;
  switch (m) {
    case Mutation::kBitFlip: {
      const std::uint64_t bit = rng.below(size * 8);
      out.bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      return out;
    }
    case Mutation::kByteFlip:
      out.bytes[rng.below(size)] ^= 0xff;
      return out;
    case Mutation::kLaneArith: {
      if (full_lanes == 0) return extend(seed, rng);
      const std::size_t lane = rng.below(full_lanes);
      const std::uint64_t k = 1 + rng.below(16);
      const bool add = rng.below(2) == 0;
      const std::uint64_t v = read_lane(out.bytes, lane);
      write_lane(out.bytes, lane, add ? v + k : v - k);
      return out;
    }
    case Mutation::kLaneOverwrite: {
      if (full_lanes == 0) return extend(seed, rng);
      const std::size_t lane = rng.below(full_lanes);
      write_lane(out.bytes, lane, rng.next());
      if (out == seed) out.bytes[lane * kLaneBytes] ^= 1;
      return out;
    }
    case Mutation::kLaneDuplicate: {
      if (full_lanes == 0) return extend(seed, rng);
      const std::size_t lane = rng.below(full_lanes);
      if (size + kLaneBytes > kMaxSeedBytes) {
        return apply_mutation(seed, Mutation::kLaneOverwrite, rng);
      }
      const auto first =
          seed.bytes.begin() + static_cast<std::ptrdiff_t>(lane * kLaneBytes);
      out.bytes.insert(out.bytes.begin() + static_cast<std::ptrdiff_t>(
                                               (lane + 1) * kLaneBytes),
                       first, first + kLaneBytes);
      return out;
    }
    case Mutation::kResize: {
      const bool shrink = rng.below(2) == 0;
      if ((shrink && size >= 2 * kLaneBytes) ||
          size + kLaneBytes > kMaxSeedBytes) {
        return truncate(seed);
      }
      return extend(seed, rng);
    }
  }
  return extend(seed, rng);
}

FuzzSeed mutate_input(const FuzzSeed& seed, SplitMix64& rng) {
  const auto m = static_cast<Mutation>(rng.below(6));
  return apply_mutation(seed, m, rng);
}

bool covers_new_trace(const EdgeSet& global,
                      std::span<const CoverageEdge> run) {
  for (const auto& e : run) {
    if (!global.count(e.packed())) return true;
  }
  return false;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kBudget:
      return "budget";
    case StopReason::kFirstBug:
      return "first-bug";
    case StopReason::kSeedsExhausted:
      return "seeds-exhausted";
  }
  return "?";
}

std::vector<Finding> FuzzResult::distinct_bugs() const {
  std::vector<Finding> out;
  for (const auto& c : crashes) {
    for (const auto& f : c.outcome.findings) {
      const bool seen = std::any_of(out.begin(), out.end(), [&](const auto& g) {
        return g.same_bug(f);
      });
      if (!seen) out.push_back(f);
    }
  }
  return out;
}

std::size_t FuzzResult::crash_count(BugKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(crashes.begin(), crashes.end(),
                    [kind](const Crash& c) { return c.outcome.found(kind); }));
}

FuzzResult fuzz(const Program& program, std::vector<FuzzSeed> corpus,
                const FuzzOptions& options) {
  const auto start = Clock::now();
  FuzzResult result;
  ExecConfig exec = options.exec;
  exec.record_witness = false;
  exec.record_accesses = false;
  exec.collect_coverage = true;
  ExecConfig recording = exec;
  recording.record_witness = true;

  SplitMix64 rng(options.master_seed);
  EdgeSet global;
  std::set<std::pair<BugKind, Location>> witnessed;
  bool stop = false;

  auto budget_left = [&] {
    if (options.budget.max_execs &&
        result.executions >= *options.budget.max_execs) {
      return std::uint64_t{0};
    }
    if (options.budget.max_time &&
        Clock::now() - start >= *options.budget.max_time) {
      return std::uint64_t{0};
    }
    return options.budget.max_execs
               ? *options.budget.max_execs - result.executions
               : ~std::uint64_t{0};
  };

  auto execute = [&](const FuzzSeed& s) {
    const auto inputs = s.inputs();
    return run(program, inputs, s.delay_seed(), exec);
  };

  // Corpus seeds are already queued.
  auto absorb = [&](const FuzzSeed& s, ExecOutcome&& out,
                    bool queued_already = false) {
    const std::uint64_t index = result.executions++;
    bool fresh = false;
    process_coverage(global, out.coverage, fresh);
    const bool crashed = out.status == ExecStatus::kBugFound;
    const bool queued = !crashed && fresh && !queued_already;
    if (queued) result.queue.push_back(s);
    if (options.observer) {
      options.observer(FuzzExecEvent{index, &s, &out, fresh, queued, crashed,
                                     result.queue.size()});
    }
    if (!crashed) return;
    Crash crash{s, std::move(out), index, std::nullopt};
    bool novel = false;
    for (const auto& f : crash.outcome.findings) {
      if (witnessed.emplace(f.kind, f.location).second) novel = true;
    }
    if (options.witnesses == WitnessPolicy::kAll ||
        (options.witnesses == WitnessPolicy::kDistinct && novel)) {
      const auto inputs = s.inputs();
      const ExecOutcome again = run(program, inputs, s.delay_seed(), recording);
      crash.report =
          record(program, again, std::to_string(index), exec.echo());
    }
    crash.outcome.coverage.clear();
    crash.outcome.coverage.shrink_to_fit();
    if (options.stop_on_bug &&
        (!options.stop_kind || crash.outcome.found(*options.stop_kind))) {
      stop = true;
    }
    result.crashes.push_back(std::move(crash));
  };

  auto finish = [&](StopReason reason) {
    result.stop = reason;
    std::vector<std::uint64_t> edges(global.begin(), global.end());
    std::sort(edges.begin(), edges.end());
    result.coverage.reserve(edges.size());
    for (auto p : edges) result.coverage.push_back(CoverageEdge::unpack(p));
    result.seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    return std::move(result);
  };

  result.queue = corpus;
  for (const auto& s : corpus) {
    if (budget_left() == 0) return finish(StopReason::kBudget);
    absorb(s, execute(s), true);
    if (stop) return finish(StopReason::kFirstBug);
  }
  if (result.queue.empty()) return finish(StopReason::kSeedsExhausted);

  const int jobs = std::max(1, options.jobs);
  std::size_t cursor = 0;
  for (;;) {
    const std::uint64_t left = budget_left();
    if (left == 0) return finish(StopReason::kBudget);
    const FuzzSeed parent = result.queue[cursor % result.queue.size()];
    ++cursor;
    const std::uint64_t n =
        std::min<std::uint64_t>(1 + rng.next() % 16, left);

    if (jobs == 1) {
      for (std::uint64_t i = 0; i < n; ++i) {
        if (i > 0 && budget_left() == 0) return finish(StopReason::kBudget);
        FuzzSeed child = mutate_input(parent, rng);
        absorb(child, execute(child));
        if (stop) return finish(StopReason::kFirstBug);
      }
      continue;
    }

    std::vector<FuzzSeed> batch;
    batch.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      batch.push_back(mutate_input(parent, rng));
    }
    std::vector<ExecOutcome> outcomes(batch.size());
    std::vector<std::thread> workers;
    const std::size_t width =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), batch.size());
    for (std::size_t w = 0; w < width; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < batch.size(); i += width) {
          outcomes[i] = execute(batch[i]);
        }
      });
    }
    for (auto& t : workers) t.join();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      absorb(batch[i], std::move(outcomes[i]));
      if (stop) return finish(StopReason::kFirstBug);
    }
  }
}

}  // namespace ebf
