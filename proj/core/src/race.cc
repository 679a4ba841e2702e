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

#include "ebf/race.h"

namespace ebf {

RaceDetector::RaceDetector(std::size_t sync_objects) : sync_(sync_objects) {}

VectorClock& RaceDetector::thread_clock(int thread) {
  if (static_cast<std::size_t>(thread) >= threads_.size()) {
    threads_.resize(thread + 1);
  }
  return threads_[thread];
}

void RaceDetector::start_thread(int thread) { thread_clock(thread).set(thread, 1); }

void RaceDetector::on_create(int parent, int child) {
  VectorClock inherited = thread_clock(parent);
  inherited.set(child, 1);
  thread_clock(child) = std::move(inherited);
  threads_[parent].tick(parent);
}

void RaceDetector::on_join(int joiner, int joinee) {
  VectorClock done = thread_clock(joinee);
  thread_clock(joiner).join(done);
}

void RaceDetector::on_acquire(int thread, int sync) {
  thread_clock(thread).join(sync_[sync]);
}

void RaceDetector::on_release(int thread, int sync) {
  VectorClock& c = thread_clock(thread);
  sync_[sync] = c;
  c.tick(thread);
}

void RaceDetector::record(std::vector<std::uint32_t>& epochs, int thread,
                          std::uint32_t epoch) {
  if (static_cast<std::size_t>(thread) >= epochs.size()) {
    epochs.resize(thread + 1, 0);
  }
  epochs[thread] = epoch;
}

bool RaceDetector::unordered(const std::vector<std::uint32_t>& epochs,
                             int thread) const {
  const VectorClock& c = threads_[thread];
  for (std::size_t u = 0; u < epochs.size(); ++u) {
    if (static_cast<int>(u) == thread || epochs[u] == 0) continue;
    if (epochs[u] > c.get(static_cast<int>(u))) return true;
  }
  return false;
}

bool RaceDetector::on_read(int thread, std::int64_t location) {
  Cell& cell = cells_[location];
  thread_clock(thread);
  bool race = unordered(cell.writes, thread);
  record(cell.reads, thread, threads_[thread].get(thread));
  return race;
}

bool RaceDetector::on_write(int thread, std::int64_t location) {
  Cell& cell = cells_[location];
  thread_clock(thread);
  bool race = unordered(cell.writes, thread) || unordered(cell.reads, thread);
  record(cell.writes, thread, threads_[thread].get(thread));
  return race;
}

void RaceDetector::encode(std::string& out) const {
  auto put = [&out](std::uint64_t v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof v);
  };
  auto put_vec = [&](const std::vector<std::uint32_t>& v) {
    put(v.size());
    for (auto x : v) put(x);
  };
  put(threads_.size());
  for (const auto& c : threads_) put_vec(c.raw());
  for (const auto& c : sync_) put_vec(c.raw());
  put(cells_.size());
  for (const auto& [loc, cell] : cells_) {
    put(static_cast<std::uint64_t>(loc));
    put_vec(cell.reads);
    put_vec(cell.writes);
  }
}

}  // namespace ebf
