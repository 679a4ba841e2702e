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

#ifndef EBF_RNG_H_
#define EBF_RNG_H_

#include <cstdint>

namespace ebf {

// splitmix64. Every randomized component owns one of these so that results
// are bit-reproducible across platforms and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound]. bound == UINT64_MAX returns a raw draw.
  std::uint64_t uniform_inclusive(std::uint64_t bound) {
    std::uint64_t r = next();
    if (bound == ~std::uint64_t{0}) return r;
    return r % (bound + 1);
  }

  // Uniform in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  // Always consumes exactly one draw.
  bool bernoulli(double p) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return u < p;
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace ebf

#endif  // EBF_RNG_H_
