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

// The concurrent intermediate representation (".cir") that every engine in
// this project consumes. A program is a set of shared integer variables,
// declared mutexes, and named thread kinds, each a flat instruction list with
// block-local labels. Execution starts with one instance of the `main` kind.
//
// Grammar, one item per line, `#` starts a comment:
//
//   shared <name> = <int>          mutex <name>          thread <kind>:
//   <label>:
//   r = <expr>                     r = load <shared>     store <shared> <expr>
//   r = nondet()                   r = create <kind>     join r
//   lock <mutex>                   unlock <mutex>
//   atomic_begin                   atomic_end
//   assume <cond>                  assert <cond>         error
//   goto <label>                   if <cond> goto <label>
//   r = alloc <expr>               free r
//   r = hload h[<expr>]            hstore h[<expr>] <expr>
//   return
//
// <cond> is `<expr> (==|!=|<|<=|>|>=) <expr>` and <expr> is
// `<term> ([+-*] <term>)*` with the usual precedence; a term is a register
// or an integer literal. Arithmetic is 64-bit two's complement and wraps.

#ifndef EBF_MIR_H_
#define EBF_MIR_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ebf {

using Value = std::int64_t;

enum class Opcode : std::uint8_t {
  kAssign,
  kLoad,
  kStore,
  kNondet,
  kCreate,
  kJoin,
  kLock,
  kUnlock,
  kAtomicBegin,
  kAtomicEnd,
  kAssume,
  kAssert,
  kError,
  kGoto,
  kBranch,
  kAlloc,
  kFree,
  kHeapLoad,
  kHeapStore,
  kReturn,
};

std::string_view opcode_name(Opcode op);

struct Term {
  bool is_register = false;
  int reg = -1;  // index into ThreadKind::registers
  Value constant = 0;

  bool operator==(const Term&) const = default;
};

// ops[i] joins terms[i] and terms[i + 1]; each op is one of '+', '-', '*'.
struct Expr {
  std::vector<Term> terms;
  std::vector<char> ops;

  static Expr constant(Value v) { return Expr{{Term{false, -1, v}}, {}}; }
  static Expr reg(int r) { return Expr{{Term{true, r, 0}}, {}}; }
  bool empty() const { return terms.empty(); }
  bool operator==(const Expr&) const = default;
};

enum class CmpOp : std::uint8_t { kEq, kNe, kLt, kLe, kGt, kGe };

std::string_view cmp_name(CmpOp op);

struct Condition {
  Expr lhs;
  CmpOp op = CmpOp::kEq;
  Expr rhs;

  bool operator==(const Condition&) const = default;
};

// Operand usage by opcode:
//   dest    kAssign kLoad kNondet kCreate kAlloc kHeapLoad
//   handle  kJoin kFree kHeapLoad kHeapStore  (register holding a thread id
//           or heap handle)
//   symbol  shared variable (kLoad kStore), mutex (kLock kUnlock), thread
//           kind (kCreate) or label (kGoto kBranch); `target` is its
//           resolved index (instruction index for labels), -1 if unresolved
//   value   kAssign kStore kAlloc kHeapStore
//   index   kHeapLoad kHeapStore
//   cond    kAssume kAssert kBranch
struct Instruction {
  Opcode op = Opcode::kReturn;
  int dest = -1;
  int handle = -1;
  std::string symbol;
  int target = -1;
  Expr value;
  Expr index;
  Condition cond;

  bool operator==(const Instruction&) const = default;
};

struct ThreadKind {
  std::string name;
  std::vector<Instruction> body;
  std::vector<int> lines;  // source line per instruction; may be empty
  std::vector<std::pair<std::string, int>> labels;  // label -> instruction
  std::vector<std::string> registers;

  int line_of(std::size_t pc) const {
    return pc < lines.size() ? lines[pc] : static_cast<int>(pc) + 1;
  }
  int find_label(std::string_view label) const;
  int find_register(std::string_view reg) const;
  int intern_register(std::string_view reg);

  // Line numbers are presentation only and take no part in equality.
  bool operator==(const ThreadKind& o) const {
    return name == o.name && body == o.body && labels == o.labels &&
           registers == o.registers;
  }
};

struct SharedVar {
  std::string name;
  Value init = 0;

  bool operator==(const SharedVar&) const = default;
};

struct Program {
  std::vector<SharedVar> shared;
  std::vector<std::string> mutexes;
  std::vector<ThreadKind> threads;
  std::string entry = "main";

  int find_thread(std::string_view kind) const;
  int find_shared(std::string_view name) const;
  int find_mutex(std::string_view name) const;
  int entry_index() const { return find_thread(entry); }
  std::size_t nondet_sites() const;

  bool operator==(const Program&) const = default;
};

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string message;

  std::string str() const;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  int line() const { return diagnostics_.front().line; }
  int column() const { return diagnostics_.front().column; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// Parses, links and validates. Throws ParseError on the first syntax error,
// or with every validation diagnostic when the text is well-formed but the
// program is not.
Program parse_program(std::string_view text);

// Resolves symbol targets (labels, thread kinds, shared variables, mutexes)
// by name. Unresolvable symbols keep target == -1.
void link(Program& program);

// One diagnostic per violated structural invariant; empty iff the program is
// safe to execute.
std::vector<Diagnostic> validate(const Program& program);

// Canonical text; parse_program(to_text(p)) == p for every valid p.
std::string to_text(const Program& program);
std::string to_text(const Expr& e, const ThreadKind& kind);
std::string to_text(const Condition& c, const ThreadKind& kind);
std::string to_text(const Instruction& ins, const ThreadKind& kind);

// 64-bit FNV-1a over the canonical text.
std::uint64_t fingerprint(const Program& program);
std::string fingerprint_hex(const Program& program);

Value evaluate(const Expr& e, const std::vector<Value>& regs);
bool evaluate(const Condition& c, const std::vector<Value>& regs);

}  // namespace ebf

#endif  // EBF_MIR_H_
