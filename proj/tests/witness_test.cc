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

#include "ebf/witness.h"

#include <gtest/gtest.h>

#include <string>
#include <variant>
#include <vector>

#include "ebf/exec.h"
#include "ebf/mir.h"
#include "support/random_program.h"

namespace ebf {
namespace {

constexpr const char* kListing1 = R"(shared a = 0
thread main:
  t1 = create worker
  t2 = create worker
  join t1
  join t2
  v = load a
  assert v == 10
  return
thread worker:
  i = 0
loop:
  x = load a
  x = x + 1
  store a x
  i = i + 1
  if i < 5 goto loop
  return
)";

ExecConfig recording() {
  ExecConfig c;
  c.record_witness = true;
  c.exit_prob = 0;
  c.detectors = DetectorSet::all().without(Detector::kRace);
  return c;
}

// First delay seed whose run hits the assertion.
CrashReport listing1_report(const Program& p) {
  for (std::uint64_t seed = 0;; ++seed) {
    ExecOutcome o = run(p, {}, seed, recording());
    if (o.found(BugKind::kAssertionFailure)) {
      auto r = record(p, o, "gbf-" + std::to_string(seed), "delay_max=100");
      return *r;
    }
  }
}

TEST(WitnessFormatTest, SingleDeclaration) {
  CrashReport r;
  r.run_id = "x";
  r.program_hash = "0123456789abcdef";
  r.events.emplace_back(event::Decl{"a", "main", 0});
  EXPECT_EQ(serialize(r),
            "run x\nprogram 0123456789abcdef\nDECL a main #0\n");
}

TEST(WitnessFormatTest, EveryEventKindRoundTrips) {
  CrashReport r;
  r.run_id = "gbf-17-2";
  r.program_hash = "00000000deadbeef";
  r.config = "delay_max=100 exit_prob=0.0001";
  r.events = {
      event::Decl{"a", "main", 0},
      event::Store{0, 12, "worker", -7},
      event::Sched{42, 1},
      event::Input{9223372036854775807},
      event::Create{0, 2},
      event::Join{0, 2},
      event::Finding{BugKind::kDeadlock, Location{"left", 3}, 99},
  };
  const std::string text = serialize(r);
  EXPECT_NE(text.find("STORE #0 12 worker -7\n"), std::string::npos);
  EXPECT_NE(text.find("SCHED 42 t1\n"), std::string::npos);
  EXPECT_NE(text.find("CREATE t0 t2\n"), std::string::npos);
  EXPECT_NE(text.find("FINDING Deadlock left:3 99\n"), std::string::npos);
  EXPECT_EQ(deserialize(text), r);
  EXPECT_FALSE(check_well_formed(r).has_value());
}

TEST(WitnessFormatTest, RandomReportsRoundTrip) {
  SplitMix64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    CrashReport r = testing::random_report(rng);
    const std::string text = serialize(r);
    CrashReport back = deserialize(text);
    ASSERT_EQ(back, r) << text;
    EXPECT_EQ(serialize(back), text);
  }
}

TEST(WitnessFormatTest, RejectsMalformedLines) {
  const std::string good =
      "run a\nprogram 0123456789abcdef\nDECL a main #0\n"
      "FINDING AssertionFailure main:3 5\n";
  EXPECT_NO_THROW(deserialize(good));
  struct Case {
    std::string text;
    int line;
  };
  const Case cases[] = {
      {"run a\nprogram 0123456789abcdef\nFINDING Nope main:3 5\n", 3},
      {"run a\nprogram 0123456789abcdef\nFINDING AssertionFailure main 5\n",
       3},
      {"run a\nprogram 0123456789abcdef\nDECL a main 0\n", 3},
      {"run a\nprogram 0123456789abcdef\nSCHED x t1\n", 3},
      {"run a\nprogram 0123456789abcdef\nSCHED 1 t1 extra\n", 3},
      {"run a\nprogram 0123456789abcdef\nBOGUS 1\n", 3},
      {"program 0123456789abcdef\n", 1},
      {"run a\n", 2},
  };
  for (const Case& c : cases) {
    try {
      deserialize(c.text);
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const WitnessFormatError& e) {
      EXPECT_EQ(e.line(), c.line) << c.text;
    }
  }
}

TEST(WitnessFormatTest, WellFormednessChecks) {
  CrashReport r;
  r.run_id = "x";
  r.program_hash = "0123456789abcdef";
  r.events.emplace_back(event::Store{3, 1, "main", 0});
  r.events.emplace_back(event::Finding{});
  EXPECT_TRUE(check_well_formed(r).has_value());  // STORE before DECL

  r.events = {event::Decl{"a", "main", 0}, event::Decl{"b", "main", 0},
              event::Finding{}};
  EXPECT_TRUE(check_well_formed(r).has_value());  // duplicate address

  r.events = {event::Decl{"a", "main", 0}};
  EXPECT_TRUE(check_well_formed(r).has_value());  // no trailing FINDING
}

TEST(WitnessRecordTest, OnlyBugFindingRunsAreKept) {
  Program p = parse_program(kListing1);
  ExecConfig c = recording();
  c.delay_max = 0;
  ExecOutcome clean = run(p, {}, 0, c);
  ASSERT_EQ(clean.status, ExecStatus::kCompleted);
  EXPECT_FALSE(record(p, clean, "r").has_value());

  ExecConfig exhaust = recording();
  exhaust.exit_prob = 1.0;
  ExecOutcome gone = run(p, {}, 0, exhaust);
  ASSERT_EQ(gone.status, ExecStatus::kExhausted);
  EXPECT_FALSE(record(p, gone, "r").has_value());
}

TEST(WitnessRecordTest, ReportIsWellFormedAndShowsLostUpdate) {
  Program p = parse_program(kListing1);
  CrashReport r = listing1_report(p);
  EXPECT_FALSE(check_well_formed(r).has_value());
  EXPECT_EQ(r.program_hash, fingerprint_hex(p));
  ASSERT_FALSE(r.findings().empty());
  EXPECT_EQ(r.findings().back().kind, BugKind::kAssertionFailure);

  int a_addr = -1;
  std::vector<Value> stores;
  for (const auto& e : r.events) {
    if (const auto* d = std::get_if<event::Decl>(&e)) {
      if (d->name == "a") a_addr = d->addr;
    } else if (const auto* s = std::get_if<event::Store>(&e)) {
      if (s->addr == a_addr) stores.push_back(s->value);
    }
  }
  ASSERT_GE(a_addr, 0);
  // Some value of `a` is written twice: an increment was lost.
  bool repeated = false;
  for (std::size_t i = 0; i < stores.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) repeated |= stores[i] == stores[j];
  }
  EXPECT_TRUE(repeated);
}

TEST(WitnessReplayTest, ReplayReproducesFindings) {
  Program p = parse_program(kListing1);
  CrashReport r = listing1_report(p);
  ExecOutcome again = replay(p, r, recording());
  EXPECT_TRUE(reproduces(r, again));
  // Round trip through text first.
  ExecOutcome from_text = replay(p, deserialize(serialize(r)), recording());
  EXPECT_TRUE(reproduces(r, from_text));
}

TEST(WitnessReplayTest, FingerprintMismatchIsAnError) {
  Program p = parse_program(kListing1);
  CrashReport r = listing1_report(p);
  Program other = parse_program("thread main:\n  return\n");
  EXPECT_THROW(replay(other, r, recording()), ReplayError);
}

TEST(WitnessReplayTest, InfeasibleScheduleIsAnError) {
  Program p = parse_program(kListing1);
  CrashReport r = listing1_report(p);
  // Make main run a third time before any worker: it is blocked on join.
  std::vector<WitnessEvent> events;
  int scheds = 0;
  for (const auto& e : r.events) {
    if (const auto* s = std::get_if<event::Sched>(&e)) {
      ++scheds;
      if (scheds == 3) {
        events.emplace_back(event::Sched{s->tick, 0});
        continue;
      }
    }
    events.push_back(e);
  }
  r.events = events;
  EXPECT_THROW(replay(p, r, recording()), ReplayError);
}

TEST(WitnessReplayTest, TamperedFindingDoesNotReproduce) {
  Program p = parse_program(kListing1);
  CrashReport r = listing1_report(p);
  auto& last = std::get<event::Finding>(r.events.back());
  last.location.line += 1;
  EXPECT_FALSE(reproduces(r, replay(p, r, recording())));
}

TEST(WitnessReplayTest, ReplayReadsDetectorsFromConfig) {
  Program p = parse_program(R"(shared A = 0
thread main:
  t1 = create writer
  t2 = create writer
  join t1
  join t2
  return
thread writer:
  store A 1
  return
)");
  ExecConfig c = recording();
  c.detectors = DetectorSet::all();
  c.delay_max = 0;
  ExecOutcome o = run(p, {}, 0, c);
  auto r = record(p, o, "race", c.echo());
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(reproduces(*r, replay(p, *r)));
}

TEST(WitnessReplayTest, AccessorsExtractScheduleAndInputs) {
  CrashReport r;
  r.events = {event::Sched{0, 0}, event::Input{4}, event::Sched{3, 2},
              event::Input{-1}, event::Finding{}};
  EXPECT_EQ(r.schedule(), (std::vector<int>{0, 2}));
  EXPECT_EQ(r.inputs(), (std::vector<Value>{4, -1}));
  EXPECT_EQ(r.findings().size(), 1u);
}

}  // namespace
}  // namespace ebf
