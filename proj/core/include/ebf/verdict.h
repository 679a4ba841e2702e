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


// Per-engine verdicts and the interface an analysis engine implements to take
// part in the ensemble.

#ifndef EBF_VERDICT_H_
#define EBF_VERDICT_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebf/finding.h"
#include "ebf/mir.h"
#include "ebf/witness.h"

namespace ebf {

enum class Verdict : std::uint8_t { kSafe, kBug, kUnknown };

std::string_view to_string(Verdict v);

struct Counterexample {
  std::vector<Value> inputs;
  std::vector<int> schedule;  // thread id per step
  Finding finding;
};

struct EngineVerdict {
  std::string engine;
  Verdict verdict = Verdict::kUnknown;
  std::vector<Finding> findings;
  std::optional<Counterexample> counterexample;
  std::optional<CrashReport> witness;
  std::string note;  // why Unknown, or an engine error
  std::uint64_t work = 0;  // explored states or executions
  double seconds = 0;
};

class VerificationEngine {
 public:
  virtual ~VerificationEngine() = default;
  virtual std::string_view name() const = 0;
  // Must return within roughly `budget` and never throw for a valid program.
  virtual EngineVerdict check(const Program& program,
                              std::chrono::milliseconds budget) = 0;
};

}  // namespace ebf

#endif  // EBF_VERDICT_H_
