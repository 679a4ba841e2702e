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

#include "ebf/mir.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <string>

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

TEST(MirParseTest, ParsesTwoKindProgram) {
  Program p = parse_program(kListing1);
  ASSERT_EQ(p.threads.size(), 2u);
  ASSERT_EQ(p.shared.size(), 1u);
  EXPECT_EQ(p.shared[0].name, "a");
  EXPECT_EQ(p.threads[0].name, "main");
  EXPECT_EQ(p.threads[1].name, "worker");
  EXPECT_EQ(p.threads[0].body.size(), 7u);
  EXPECT_EQ(p.threads[1].body.size(), 7u);
  EXPECT_EQ(p.entry_index(), 0);
  EXPECT_TRUE(validate(p).empty());

  const Instruction& branch = p.threads[1].body[5];
  EXPECT_EQ(branch.op, Opcode::kBranch);
  EXPECT_EQ(branch.target, 1);
  EXPECT_EQ(p.threads[1].line_of(5), 19);
}

TEST(MirParseTest, EmptyTextHasNoEntryThread) {
  try {
    parse_program("");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("no entry thread"),
              std::string::npos);
  }
}

TEST(MirParseTest, MissingLabelNamesLabelAndLine) {
  try {
    parse_program("thread main:\n  x = 1\n  goto nowhere\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("nowhere"), std::string::npos);
  }
}

TEST(MirParseTest, SyntaxErrorCarriesPosition) {
  try {
    parse_program("thread main:\n  x = 1 +\n  return\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 0);
  }
}

TEST(MirParseTest, RejectsStructuralViolations) {
  const char* bad[] = {
      "thread main:\n  x = 1\n",                         // no terminator
      "thread main:\n  t = create ghost\n  return\n",    // unknown kind
      "thread main:\n  lock m\n  return\n",              // unknown mutex
      "thread main:\n  x = load nope\n  return\n",       // unknown shared
      "shared a = 0\nshared a = 1\nthread main:\n  return\n",
      "thread main:\n  return\nthread main:\n  return\n",
      "thread main:\n  atomic_end\n  return\n",
      "thread main:\n  atomic_begin\n  atomic_begin\n  atomic_end\n  return\n",
      "thread worker:\n  return\n",                      // no main
  };
  for (const char* text : bad) {
    EXPECT_THROW(parse_program(text), ParseError) << text;
  }
}

TEST(MirParseTest, CommentsAndBlankLinesIgnored) {
  Program a = parse_program("thread main:\n  x = 1\n  return\n");
  Program b = parse_program(
      "# header\n\nthread main:   # trailing\n\n  x = 1  # set\n  return\n");
  EXPECT_EQ(a, b);
}

TEST(MirParseTest, ExpressionPrecedence) {
  Program p = parse_program("thread main:\n  x = 2 + 3 * 4 - 1\n  return\n");
  EXPECT_EQ(evaluate(p.threads[0].body[0].value, {0}), 13);
}

TEST(MirParseTest, ArithmeticWraps) {
  Program p = parse_program(
      "thread main:\n  x = 9223372036854775807 + 1\n  return\n");
  EXPECT_EQ(evaluate(p.threads[0].body[0].value, {0}),
            std::numeric_limits<Value>::min());
}

TEST(MirValidateTest, FlagsProgrammaticViolations) {
  Program p = parse_program("thread main:\n  x = 1\n  return\n");
  EXPECT_TRUE(validate(p).empty());

  Program no_term = p;
  no_term.threads[0].body.pop_back();
  EXPECT_FALSE(validate(no_term).empty());

  Program ghost = p;
  Instruction create;
  create.op = Opcode::kCreate;
  create.dest = 0;
  create.symbol = "ghost";
  ghost.threads[0].body.insert(ghost.threads[0].body.begin(), create);
  link(ghost);
  EXPECT_FALSE(validate(ghost).empty());
}

TEST(MirValidateTest, ParseRejectsExactlyWhatValidateFlags) {
  testing::ProgramGenerator gen(11);
  for (int i = 0; i < 200; ++i) {
    Program p = parse_program(gen.next());
    // Valid programs survive a text round trip.
    EXPECT_NO_THROW(parse_program(to_text(p)));
    // Dropping the final return breaks the terminator rule in both views.
    Program broken = p;
    broken.threads.back().body.pop_back();
    broken.threads.back().lines.clear();
    for (auto& [label, index] : broken.threads.back().labels) {
      index = std::min<int>(index, broken.threads.back().body.size() - 1);
    }
    const bool flagged = !validate(broken).empty();
    bool rejected = false;
    try {
      parse_program(to_text(broken));
    } catch (const ParseError&) {
      rejected = true;
    }
    EXPECT_EQ(flagged, rejected) << to_text(broken);
  }
}

TEST(MirTextTest, RoundTripsRandomPrograms) {
  testing::ProgramGenerator gen(3, {.atomics = true});
  for (int i = 0; i < 500; ++i) {
    const std::string text = gen.next();
    Program p = parse_program(text);
    Program q = parse_program(to_text(p));
    EXPECT_EQ(p, q) << text;
    EXPECT_EQ(to_text(p), to_text(q));
    EXPECT_EQ(fingerprint(p), fingerprint(q));
  }
}

TEST(MirTextTest, RoundTripsEveryInstructionForm) {
  const char* text = R"(shared s = -4
mutex m

thread main:
  h = alloc 3
  hstore h[1] 7 * 2
  v = hload h[1]
  free h
  t = create other
  join t
  lock m
  unlock m
  atomic_begin
  atomic_end
  n = nondet()
  assume n >= -1
  if n != 0 goto out
  store s v - 1
out:
  assert v <= 14
  return

thread other:
top:
  x = load s
  if x > 100 goto top
  goto end
end:
  error
)";
  Program p = parse_program(text);
  EXPECT_EQ(parse_program(to_text(p)), p);
  EXPECT_EQ(p.nondet_sites(), 1u);
}

TEST(MirTextTest, ParsingIsDeterministic) {
  EXPECT_EQ(parse_program(kListing1), parse_program(kListing1));
  EXPECT_EQ(fingerprint_hex(parse_program(kListing1)),
            fingerprint_hex(parse_program(kListing1)));
  EXPECT_EQ(fingerprint_hex(parse_program(kListing1)).size(), 16u);
}

TEST(MirTextTest, FingerprintIgnoresFormatting) {
  Program a = parse_program("thread main:\n  x = 1\n  return\n");
  Program b = parse_program("\n\n# c\nthread main:\n    x =   1\n  return\n");
  EXPECT_EQ(fingerprint(a), fingerprint(b));
  Program c = parse_program("thread main:\n  x = 2\n  return\n");
  EXPECT_NE(fingerprint(a), fingerprint(c));
}

}  // namespace
}  // namespace ebf
