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


#include "ebf/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ebf {

std::optional<Expectation> parse_expectation(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  if (!(in >> word)) return std::nullopt;
  Expectation e;
  if (word == "Unsafe") {
    e.unsafe = true;
  } else if (word != "Safe") {
    return std::nullopt;
  }
  while (in >> word) {
    if (word == "schedule") {
      e.schedule = true;
    } else if (auto k = parse_bug_kind(word); k && e.unsafe && !e.kind) {
      e.kind = k;
    } else {
      return std::nullopt;
    }
  }
  if (e.unsafe && !e.kind) return std::nullopt;
  return e;
}

std::vector<CorpusEntry> list_corpus(const std::filesystem::path& dir) {
  std::vector<CorpusEntry> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".cir") {
      continue;
    }
    CorpusEntry c{entry.path(), std::nullopt};
    auto sidecar = entry.path();
    sidecar.replace_extension(".expected");
    if (std::filesystem::exists(sidecar)) {
      c.expected = parse_expectation(read_file(sidecar));
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.path.filename() < b.path.filename();
  });
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Program load_program(const std::filesystem::path& path) {
  return parse_program(read_file(path));
}

}  // namespace ebf
