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


// Bundled-corpus helpers. Every `<name>.cir` may have a `<name>.expected`
// sidecar holding one line: `Safe`, or `Unsafe <BugKind>`, optionally
// followed by the tag `schedule` for bugs that need a non-default
// interleaving to show up.

#ifndef EBF_CORPUS_H_
#define EBF_CORPUS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebf/finding.h"
#include "ebf/mir.h"

namespace ebf {

struct Expectation {
  bool unsafe = false;
  std::optional<BugKind> kind;
  bool schedule = false;
};

std::optional<Expectation> parse_expectation(std::string_view text);

struct CorpusEntry {
  std::filesystem::path path;
  std::optional<Expectation> expected;  // unset when the sidecar is missing
};

// `.cir` files of `dir` sorted by file name.
std::vector<CorpusEntry> list_corpus(const std::filesystem::path& dir);

// Reads a file; throws std::runtime_error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
Program load_program(const std::filesystem::path& path);

}  // namespace ebf

#endif  // EBF_CORPUS_H_
