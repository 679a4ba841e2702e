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

#include <gtest/gtest.h>

#include <set>

#include "ebf/exec.h"
#include "ebf/mir.h"
#include "support/oracle.h"
#include "support/random_program.h"

namespace ebf {
namespace {

TEST(VectorClockTest, JoinIsPointwiseMax) {
  VectorClock a;
  a.set(0, 3);
  a.set(2, 1);
  VectorClock b;
  b.set(1, 4);
  b.set(2, 5);
  a.join(b);
  EXPECT_EQ(a.get(0), 3u);
  EXPECT_EQ(a.get(1), 4u);
  EXPECT_EQ(a.get(2), 5u);
  EXPECT_EQ(a.get(9), 0u);
  EXPECT_TRUE(b.before_or_equal(a));
  EXPECT_FALSE(a.before_or_equal(b));
}

TEST(RaceDetectorTest, UnorderedWritesRace) {
  RaceDetector d(1);
  d.start_thread(0);
  d.on_create(0, 1);
  d.on_create(0, 2);
  EXPECT_FALSE(d.on_write(1, 7));
  EXPECT_TRUE(d.on_write(2, 7));
}

TEST(RaceDetectorTest, LockOrdersAccesses) {
  RaceDetector d(1);
  d.start_thread(0);
  d.on_create(0, 1);
  d.on_create(0, 2);
  d.on_acquire(1, 0);
  EXPECT_FALSE(d.on_write(1, 7));
  d.on_release(1, 0);
  d.on_acquire(2, 0);
  EXPECT_FALSE(d.on_write(2, 7));
  EXPECT_FALSE(d.on_read(2, 7));
  d.on_release(2, 0);
}

TEST(RaceDetectorTest, CreateAndJoinOrderAccesses) {
  RaceDetector d(0);
  d.start_thread(0);
  EXPECT_FALSE(d.on_write(0, 1));
  d.on_create(0, 1);
  EXPECT_FALSE(d.on_write(1, 1));
  d.on_join(0, 1);
  EXPECT_FALSE(d.on_read(0, 1));
}

TEST(RaceDetectorTest, ParentAccessAfterCreateRaces) {
  RaceDetector d(0);
  d.start_thread(0);
  d.on_create(0, 1);
  EXPECT_FALSE(d.on_write(0, 1));
  EXPECT_TRUE(d.on_read(1, 1));
}

TEST(RaceDetectorTest, ConcurrentReadsDoNotRace) {
  RaceDetector d(0);
  d.start_thread(0);
  d.on_create(0, 1);
  d.on_create(0, 2);
  EXPECT_FALSE(d.on_read(1, 4));
  EXPECT_FALSE(d.on_read(2, 4));
  EXPECT_TRUE(d.on_write(0, 4));
}

std::set<std::uint64_t> reported(const ExecOutcome& o) {
  std::set<std::uint64_t> steps;
  for (const Finding& f : o.findings) {
    if (f.kind == BugKind::kDataRace) steps.insert(f.step);
  }
  return steps;
}

// The vector-clock detector must flag exactly the accesses that a naive
// transitive-closure happens-before computation flags.
TEST(RaceDetectorTest, MatchesNaiveHappensBefore) {
  testing::ProgramGenerator gen(77, {.max_body = 8, .atomics = true});
  ExecConfig c;
  c.delay_max = 6;
  c.exit_prob = 0;
  c.record_accesses = true;
  c.detectors = DetectorSet::all();
  int traces = 0;
  int with_races = 0;
  for (int i = 0; i < 400; ++i) {
    Program p = parse_program(gen.next());
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ExecOutcome o = run(p, {}, seed, c);
      if (o.accesses.size() > 200) continue;
      const auto expected = testing::naive_races(o.accesses);
      EXPECT_EQ(reported(o), expected) << to_text(p) << "seed " << seed;
      ++traces;
      if (!expected.empty()) ++with_races;
    }
  }
  EXPECT_GT(traces, 1000);
  EXPECT_GT(with_races, 50);
}

TEST(RaceDetectorTest, HeapAccessesAreTracked) {
  Program p = parse_program(R"(shared h = 0
thread main:
  b = alloc 2
  store h b
  t = create w
  hstore b[0] 1
  join t
  free b
  return
thread w:
  b = load h
  v = hload b[0]
  return
)");
  ExecConfig c;
  c.delay_max = 0;
  c.record_accesses = true;
  ExecOutcome o = run(p, {}, 0, c);
  EXPECT_EQ(reported(o), testing::naive_races(o.accesses));
  EXPECT_TRUE(o.found(BugKind::kDataRace));
}

}  // namespace
}  // namespace ebf
