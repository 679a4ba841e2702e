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

// Happens-before race detection with vector clocks.
//
// Each thread t carries a clock C_t; C_t[t] is its current epoch and is
// bumped after every release (unlock, atomic_end, create). Locks remember the
// clock of their last release, which the next acquirer joins; join merges the
// joinee's final clock. For every location the detector keeps, per thread,
// the epoch of that thread's latest read and latest write. An access by t
// races iff some other thread u has a conflicting latest access with epoch
// greater than C_t[u], i.e. one that does not happen before it.

#ifndef EBF_RACE_H_
#define EBF_RACE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ebf {

class VectorClock {
 public:
  std::uint32_t get(int thread) const {
    return static_cast<std::size_t>(thread) < clock_.size() ? clock_[thread]
                                                            : 0;
  }
  void set(int thread, std::uint32_t value) {
    if (static_cast<std::size_t>(thread) >= clock_.size()) {
      clock_.resize(thread + 1, 0);
    }
    clock_[thread] = value;
  }
  void tick(int thread) { set(thread, get(thread) + 1); }
  void join(const VectorClock& other) {
    if (other.clock_.size() > clock_.size()) clock_.resize(other.clock_.size());
    for (std::size_t i = 0; i < other.clock_.size(); ++i) {
      if (other.clock_[i] > clock_[i]) clock_[i] = other.clock_[i];
    }
  }
  // this <= other, pointwise
  bool before_or_equal(const VectorClock& other) const {
    for (std::size_t i = 0; i < clock_.size(); ++i) {
      if (clock_[i] > other.get(static_cast<int>(i))) return false;
    }
    return true;
  }
  std::size_t size() const { return clock_.size(); }
  const std::vector<std::uint32_t>& raw() const { return clock_; }

 private:
  std::vector<std::uint32_t> clock_;
};

class RaceDetector {
 public:
  // `sync_objects` is the number of lock-like objects (mutexes plus the
  // atomic-region mutex).
  explicit RaceDetector(std::size_t sync_objects = 0);

  void start_thread(int thread);  // the initial thread
  void on_create(int parent, int child);
  void on_join(int joiner, int joinee);
  void on_acquire(int thread, int sync);
  void on_release(int thread, int sync);

  // Return true when the access races with an earlier one.
  bool on_read(int thread, std::int64_t location);
  bool on_write(int thread, std::int64_t location);

  const VectorClock& clock(int thread) const { return threads_[thread]; }

  // Appends a canonical encoding of the detector state.
  void encode(std::string& out) const;

 private:
  struct Cell {
    std::vector<std::uint32_t> reads;
    std::vector<std::uint32_t> writes;
  };

  VectorClock& thread_clock(int thread);
  static void record(std::vector<std::uint32_t>& epochs, int thread,
                     std::uint32_t epoch);
  bool unordered(const std::vector<std::uint32_t>& epochs, int thread) const;

  std::vector<VectorClock> threads_;
  std::vector<VectorClock> sync_;
  std::map<std::int64_t, Cell> cells_;
};

}  // namespace ebf

#endif  // EBF_RACE_H_
