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


// Explicit-state bounded model checking. Depth-first over every scheduling
// choice (thread ids ascending) and every nondet value of a finite domain
// (ascending), with delays off. A path is cut after k steps or when it would
// exceed C context switches. The first finding ends the search with a
// counterexample; otherwise the verdict is Safe only if no path was cut.
//
// Visited-state pruning keys on the full machine state plus the last
// scheduled thread. Each entry keeps the residual budgets it was explored
// with and, for subtrees explored without any cut, the longest path and the
// largest switch count below it, which is enough to decide exactly whether a
// later visit under different budgets would have been cut. Hashing therefore
// never changes the verdict.

#ifndef EBF_BMC_H_
#define EBF_BMC_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "ebf/exec.h"
#include "ebf/seed.h"
#include "ebf/verdict.h"

namespace ebf {

struct BmcConfig {
  int k = 200;  // step bound
  int C = 12;   // context-switch bound
  std::vector<Value> input_domain{-1, 0, 1};
  // Adds c - 1, c, c + 1 for every constant compared against in the program.
  bool auto_domain = true;
  bool state_hashing = true;
  std::optional<std::uint64_t> max_states;
  std::optional<std::chrono::milliseconds> max_time;
  DetectorSet detectors = DetectorSet::all().without(Detector::kRace);

  // Throws std::invalid_argument.
  void validate() const;
};

struct BmcStats {
  std::uint64_t states = 0;  // nodes expanded
  std::uint64_t hash_hits = 0;
  bool cut = false;          // some path hit k or C
  bool out_of_budget = false;
  std::size_t domain_size = 0;
};

// Sorted, de-duplicated domain the search will use for `program`.
std::vector<Value> effective_domain(const Program& program,
                                    const BmcConfig& config);

EngineVerdict bmc_check(const Program& program, const BmcConfig& config,
                        BmcStats* stats = nullptr);

// The counterexample's inputs as input lanes; the delay seed is a fresh draw.
FuzzSeed counterexample_to_seed(const Counterexample& cex, SplitMix64& rng);

class BmcEngine : public VerificationEngine {
 public:
  explicit BmcEngine(BmcConfig config) : config_(std::move(config)) {}
  std::string_view name() const override { return "bmc"; }
  EngineVerdict check(const Program& program,
                      std::chrono::milliseconds budget) override;

 private:
  BmcConfig config_;
};

}  // namespace ebf

#endif  // EBF_BMC_H_
