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

#ifndef EBF_FINDING_H_
#define EBF_FINDING_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ebf {

enum class BugKind : std::uint8_t {
  kReachability,
  kAssertionFailure,
  kDataRace,
  kDeadlock,
  kThreadLeak,
  kMemorySafety,
  kMemoryLeak,
};

inline constexpr BugKind kAllBugKinds[] = {
    BugKind::kReachability, BugKind::kAssertionFailure, BugKind::kDataRace,
    BugKind::kDeadlock,     BugKind::kThreadLeak,       BugKind::kMemorySafety,
    BugKind::kMemoryLeak,
};

std::string_view to_string(BugKind kind);
std::optional<BugKind> parse_bug_kind(std::string_view text);

// A source position: thread kind ("function") and source line.
struct Location {
  std::string function;
  int line = 0;

  std::string str() const { return function + ":" + std::to_string(line); }
  static std::optional<Location> parse(std::string_view text);
  auto operator<=>(const Location&) const = default;
};

struct Finding {
  BugKind kind = BugKind::kAssertionFailure;
  Location location;
  std::uint64_t tick = 0;
  std::uint64_t step = 0;  // 0-based index of the faulting step
  std::string detail;

  bool same_bug(const Finding& o) const {
    return kind == o.kind && location == o.location;
  }
};

}  // namespace ebf

#endif  // EBF_FINDING_H_
