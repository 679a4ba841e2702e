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


#include "ebf/finding.h"

#include <charconv>

namespace ebf {

std::string_view to_string(BugKind kind) {
  switch (kind) {
    case BugKind::kReachability:
      return "Reachability";
    case BugKind::kAssertionFailure:
      return "AssertionFailure";
    case BugKind::kDataRace:
      return "DataRace";
    case BugKind::kDeadlock:
      return "Deadlock";
    case BugKind::kThreadLeak:
      return "ThreadLeak";
    case BugKind::kMemorySafety:
      return "MemorySafety";
    case BugKind::kMemoryLeak:
      return "MemoryLeak";
  }
  return "?";
}

std::optional<BugKind> parse_bug_kind(std::string_view text) {
  for (BugKind k : kAllBugKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<Location> Location::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  const std::string_view digits = text.substr(colon + 1);
  int line = 0;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), line);
  if (ec != std::errc() || ptr != digits.data() + digits.size() ||
      digits.empty()) {
    return std::nullopt;
  }
  return Location{std::string(text.substr(0, colon)), line};
}

}  // namespace ebf
