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


// The ensemble: bounded model checking first, then fuzzing seeded from the
// model checker's counterexample inputs, then aggregation of the two verdicts
// through a fixed decision matrix.

#ifndef EBF_ENSEMBLE_H_
#define EBF_ENSEMBLE_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebf/bmc.h"
#include "ebf/exec.h"
#include "ebf/gbf.h"
#include "ebf/seed.h"
#include "ebf/verdict.h"

namespace ebf {

enum class Outcome : std::uint8_t { kSafe, kUnsafe, kUnknown, kConflict };

std::string_view to_string(Outcome o);

// The decision matrix. A fuzzer never proves safety, so gbf == kSafe is read
// as kUnknown.
//
//              gbf Bug    gbf Unknown
//   bmc Safe   Conflict   Safe
//   bmc Bug    Unsafe     Unsafe
//   bmc Unk.   Unsafe     Unknown
Outcome aggregate(Verdict bmc, Verdict gbf);

struct EnsembleConfig {
  std::chrono::milliseconds total_budget{15000};
  double bmc_frac = 6.0 / 15.0;
  double fuzz_frac = 5.0 / 15.0;
  double overhead_frac = 4.0 / 15.0;
  int seed_count = 8;
  Value seed_lo = 0;
  Value seed_hi = 5000;
  ExecConfig exec;
  BmcConfig bmc;
  std::optional<std::uint64_t> fuzz_max_execs;
  int jobs = 1;

  // Throws std::invalid_argument.
  void validate() const;
  std::string echo() const;
};

// Seed corpus for the fuzzing phase: the counterexample's inputs first when
// the model checker found a bug, then random seeds with `input_lanes` lanes
// uniform in the configured range.
std::vector<FuzzSeed> make_seeds(const EngineVerdict& bmc,
                                 const EnsembleConfig& config,
                                 std::size_t input_lanes, SplitMix64& rng);

struct FinalVerdict {
  Outcome outcome = Outcome::kUnknown;
  EngineVerdict bmc;
  EngineVerdict gbf;
  std::vector<Finding> findings;   // from both engines, BMC's first
  std::optional<CrashReport> witness;
  std::string witness_engine;      // "bmc" or "gbf" when a witness exists
  double bmc_seconds = 0;
  double fuzz_seconds = 0;
  double overhead_seconds = 0;
  std::uint64_t master_seed = 0;
};

FinalVerdict run_ebf(const Program& program, const EnsembleConfig& config,
                     std::uint64_t master_seed);

// Machine-readable record of a verdict as a JSON document.
std::string to_json(const FinalVerdict& verdict, const EnsembleConfig& config,
                    std::string_view program_path,
                    std::string_view witness_path);

}  // namespace ebf

#endif  // EBF_ENSEMBLE_H_
