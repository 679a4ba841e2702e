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


#include "ebf/seed.h"

namespace ebf {

std::uint64_t read_lane(const std::vector<std::uint8_t>& bytes,
                        std::size_t i) {
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < kLaneBytes; ++b) {
    const std::size_t at = i * kLaneBytes + b;
    if (at >= bytes.size()) break;
    v |= std::uint64_t{bytes[at]} << (8 * b);
  }
  return v;
}

void write_lane(std::vector<std::uint8_t>& bytes, std::size_t i,
                std::uint64_t v) {
  for (std::size_t b = 0; b < kLaneBytes; ++b) {
    const std::size_t at = i * kLaneBytes + b;
    if (at >= bytes.size()) break;
    bytes[at] = static_cast<std::uint8_t>(v >> (8 * b));
  }
}

FuzzSeed FuzzSeed::encode(std::span<const Value> inputs,
                          std::uint64_t delay_seed) {
  FuzzSeed s;
  s.bytes.assign((inputs.size() + 1) * kLaneBytes, 0);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    write_lane(s.bytes, i, static_cast<std::uint64_t>(inputs[i]));
  }
  write_lane(s.bytes, inputs.size(), delay_seed);
  return s;
}

std::size_t FuzzSeed::input_lanes() const {
  if (bytes.size() <= kLaneBytes) return 0;
  return (bytes.size() - kLaneBytes + kLaneBytes - 1) / kLaneBytes;
}

std::vector<Value> FuzzSeed::inputs() const {
  std::vector<Value> out;
  if (bytes.size() <= kLaneBytes) return out;
  const std::vector<std::uint8_t> head(bytes.begin(),
                                       bytes.end() - kLaneBytes);
  const std::size_t lanes = input_lanes();
  out.reserve(lanes);
  for (std::size_t i = 0; i < lanes; ++i) {
    out.push_back(static_cast<Value>(read_lane(head, i)));
  }
  return out;
}

std::uint64_t FuzzSeed::delay_seed() const {
  std::uint64_t v = 0;
  const std::size_t start =
      bytes.size() > kLaneBytes ? bytes.size() - kLaneBytes : 0;
  for (std::size_t b = start; b < bytes.size(); ++b) {
    v |= std::uint64_t{bytes[b]} << (8 * (b - start));
  }
  return v;
}

std::string FuzzSeed::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 15];
  }
  return out;
}

FuzzSeed random_seed(std::size_t lanes, Value lo, Value hi, SplitMix64& rng) {
  const std::uint64_t span =
      static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  auto draw = [&] {
    return static_cast<Value>(static_cast<std::uint64_t>(lo) +
                              rng.uniform_inclusive(span));
  };
  std::vector<Value> inputs(lanes);
  for (auto& v : inputs) v = draw();
  return FuzzSeed::encode(inputs, static_cast<std::uint64_t>(draw()));
}

}  // namespace ebf
