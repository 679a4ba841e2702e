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


// The `ebf` command-line front end, as a library so tests can drive it
// in-process.

#ifndef EBF_TOOLS_CLI_H_
#define EBF_TOOLS_CLI_H_

#include <chrono>
#include <optional>
#include <ostream>
#include <string_view>

#include "ebf/ensemble.h"

namespace ebf::cli {

// Process exit statuses.
inline constexpr int kExitSafe = 0;
inline constexpr int kExitUnsafe = 1;
inline constexpr int kExitUnknown = 2;
inline constexpr int kExitConflict = 3;
inline constexpr int kExitUsage = 4;

int exit_code(Outcome outcome);

// "60s", "500ms", "2m", "1h"; a bare number means seconds.
std::optional<std::chrono::milliseconds> parse_duration(std::string_view text);

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace ebf::cli

#endif  // EBF_TOOLS_CLI_H_
