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


// Fuzzer seeds. A seed is raw bytes: the last 8 (zero-padded on the right
// when the seed is shorter) form the little-endian delay seed, and the bytes
// before them are read as consecutive little-endian 64-bit program inputs,
// the final partial lane zero-padded. Any byte string decodes.

#ifndef EBF_SEED_H_
#define EBF_SEED_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ebf/mir.h"
#include "ebf/rng.h"

namespace ebf {

inline constexpr std::size_t kLaneBytes = 8;

struct FuzzSeed {
  std::vector<std::uint8_t> bytes;

  static FuzzSeed encode(std::span<const Value> inputs,
                         std::uint64_t delay_seed);

  std::vector<Value> inputs() const;
  std::uint64_t delay_seed() const;
  // Number of 8-byte lanes before the delay suffix (partial lane included).
  std::size_t input_lanes() const;

  std::string hex() const;
  bool operator==(const FuzzSeed&) const = default;
};

// Reads/writes lane `i` counted from the start of the byte string; bytes past
// the end read as zero and are not written.
std::uint64_t read_lane(const std::vector<std::uint8_t>& bytes, std::size_t i);
void write_lane(std::vector<std::uint8_t>& bytes, std::size_t i,
                std::uint64_t v);

// A seed of `lanes` inputs uniform in [lo, hi] and a delay seed from the same
// range.
FuzzSeed random_seed(std::size_t lanes, Value lo, Value hi, SplitMix64& rng);

}  // namespace ebf

#endif  // EBF_SEED_H_
