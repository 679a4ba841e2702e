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

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace ebf {

std::string_view opcode_name(Opcode op) {
  switch (op) {
    case Opcode::kAssign: return "assign";
    case Opcode::kLoad: return "load";
    case Opcode::kStore: return "store";
    case Opcode::kNondet: return "nondet";
    case Opcode::kCreate: return "create";
    case Opcode::kJoin: return "join";
    case Opcode::kLock: return "lock";
    case Opcode::kUnlock: return "unlock";
    case Opcode::kAtomicBegin: return "atomic_begin";
    case Opcode::kAtomicEnd: return "atomic_end";
    case Opcode::kAssume: return "assume";
    case Opcode::kAssert: return "assert";
    case Opcode::kError: return "error";
    case Opcode::kGoto: return "goto";
    case Opcode::kBranch: return "if";
    case Opcode::kAlloc: return "alloc";
    case Opcode::kFree: return "free";
    case Opcode::kHeapLoad: return "hload";
    case Opcode::kHeapStore: return "hstore";
    case Opcode::kReturn: return "return";
  }
  return "?";
}

std::string_view cmp_name(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "==";
    case CmpOp::kNe: return "!=";
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

int ThreadKind::find_label(std::string_view label) const {
  for (const auto& [name, index] : labels) {
    if (name == label) return index;
  }
  return -1;
}

int ThreadKind::find_register(std::string_view reg) const {
  for (std::size_t i = 0; i < registers.size(); ++i) {
    if (registers[i] == reg) return static_cast<int>(i);
  }
  return -1;
}

int ThreadKind::intern_register(std::string_view reg) {
  int idx = find_register(reg);
  if (idx >= 0) return idx;
  registers.emplace_back(reg);
  return static_cast<int>(registers.size()) - 1;
}

int Program::find_thread(std::string_view kind) const {
  for (std::size_t i = 0; i < threads.size(); ++i) {
    if (threads[i].name == kind) return static_cast<int>(i);
  }
  return -1;
}

int Program::find_shared(std::string_view name) const {
  for (std::size_t i = 0; i < shared.size(); ++i) {
    if (shared[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int Program::find_mutex(std::string_view name) const {
  for (std::size_t i = 0; i < mutexes.size(); ++i) {
    if (mutexes[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t Program::nondet_sites() const {
  std::size_t n = 0;
  for (const auto& t : threads) {
    n += std::count_if(t.body.begin(), t.body.end(), [](const Instruction& i) {
      return i.op == Opcode::kNondet;
    });
  }
  return n;
}

std::string Diagnostic::str() const {
  std::ostringstream os;
  os << "line " << line;
  if (column > 0) os << ", column " << column;
  os << ": " << message;
  return os.str();
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "\n";
    out += d.str();
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_messages(diagnostics)),
      diagnostics_(std::move(diagnostics)) {
  if (diagnostics_.empty()) diagnostics_.push_back({0, 0, "parse error"});
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { kIdent, kInt, kPunct, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  int column = 0;
};

const char* const kKeywords[] = {
    "shared", "mutex",  "thread", "return", "error",  "atomic_begin",
    "atomic_end", "goto", "if",   "assume", "assert", "lock",
    "unlock", "join",   "free",   "store",  "hstore", "load",
    "nondet", "create", "alloc",  "hload",
};

bool is_keyword(std::string_view s) {
  return std::find(std::begin(kKeywords), std::end(kKeywords), s) !=
         std::end(kKeywords);
}

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class LineParser {
 public:
  LineParser(std::string_view line, int line_no) : line_no_(line_no) {
    tokenize(line);
  }

  bool at_end() const { return tokens_[pos_].kind == Tok::kEnd; }
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool peek_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::kPunct && peek(ahead).text == p;
  }
  bool peek_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::kIdent && peek(ahead).text == w;
  }

  [[noreturn]] void fail(const std::string& msg, int column = -1) const {
    int col = column >= 0 ? column : peek().column;
    throw ParseError({{line_no_, col, msg}});
  }

  Token next() {
    Token t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  void expect_punct(std::string_view p) {
    if (!peek_punct(p)) {
      fail("expected '" + std::string(p) + "' but found " + describe(peek()));
    }
    next();
  }

  void expect_word(std::string_view w) {
    if (!peek_word(w)) {
      fail("expected '" + std::string(w) + "' but found " + describe(peek()));
    }
    next();
  }

  std::string name(std::string_view what) {
    if (peek().kind != Tok::kIdent || is_keyword(peek().text)) {
      fail("expected " + std::string(what) + " name but found " +
           describe(peek()));
    }
    return next().text;
  }

  Value integer() {
    bool negative = false;
    int col = peek().column;
    if (peek_punct("-")) {
      next();
      negative = true;
    }
    if (peek().kind != Tok::kInt) {
      fail("expected integer literal but found " + describe(peek()), col);
    }
    return parse_int(next(), negative);
  }

  void expect_end() {
    if (!at_end()) fail("unexpected " + describe(peek()));
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::kEnd) return "end of line";
    return "'" + t.text + "'";
  }

  int line_no() const { return line_no_; }

 private:
  Value parse_int(const Token& t, bool negative) {
    // Accumulate in unsigned space so INT64_MIN is representable.
    std::uint64_t mag = 0;
    const std::uint64_t limit =
        negative ? std::uint64_t{1} << 63 : (std::uint64_t{1} << 63) - 1;
    for (char c : t.text) {
      std::uint64_t d = static_cast<std::uint64_t>(c - '0');
      if (mag > (limit - d) / 10) fail("integer literal out of range", t.column);
      mag = mag * 10 + d;
    }
    return negative ? static_cast<Value>(~mag + 1) : static_cast<Value>(mag);
  }

  void tokenize(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      int col = static_cast<int>(i) + 1;
      if (c == '#') break;
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      if (ident_start(c)) {
        std::size_t j = i;
        while (j < s.size() && ident_char(s[j])) ++j;
        tokens_.push_back({Tok::kIdent, std::string(s.substr(i, j - i)), col});
        i = j;
      } else if (digit(c)) {
        std::size_t j = i;
        while (j < s.size() && digit(s[j])) ++j;
        if (j < s.size() && ident_char(s[j])) {
          throw ParseError({{line_no_, col, "malformed integer literal"}});
        }
        tokens_.push_back({Tok::kInt, std::string(s.substr(i, j - i)), col});
        i = j;
      } else if ((c == '=' || c == '!' || c == '<' || c == '>') &&
                 i + 1 < s.size() && s[i + 1] == '=') {
        tokens_.push_back({Tok::kPunct, std::string(s.substr(i, 2)), col});
        i += 2;
      } else if (std::string_view("=<>+-*()[]:").find(c) !=
                 std::string_view::npos) {
        tokens_.push_back({Tok::kPunct, std::string(1, c), col});
        ++i;
      } else {
        throw ParseError(
            {{line_no_, col, std::string("unexpected character '") + c + "'"}});
      }
    }
    tokens_.push_back({Tok::kEnd, "", static_cast<int>(s.size()) + 1});
  }

  int line_no_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

Term parse_term(LineParser& p, ThreadKind& kind) {
  if (p.peek().kind == Tok::kInt || p.peek_punct("-")) {
    return Term{false, -1, p.integer()};
  }
  std::string reg = p.name("register");
  return Term{true, kind.intern_register(reg), 0};
}

Expr parse_expr(LineParser& p, ThreadKind& kind) {
  Expr e;
  e.terms.push_back(parse_term(p, kind));
  while (p.peek_punct("+") || p.peek_punct("-") || p.peek_punct("*")) {
    e.ops.push_back(p.next().text[0]);
    e.terms.push_back(parse_term(p, kind));
  }
  return e;
}

Condition parse_cond(LineParser& p, ThreadKind& kind) {
  Condition c;
  c.lhs = parse_expr(p, kind);
  const Token& t = p.peek();
  static const std::pair<const char*, CmpOp> kOps[] = {
      {"==", CmpOp::kEq}, {"!=", CmpOp::kNe}, {"<", CmpOp::kLt},
      {"<=", CmpOp::kLe}, {">", CmpOp::kGt},  {">=", CmpOp::kGe}};
  bool found = false;
  if (t.kind == Tok::kPunct) {
    for (const auto& [text, op] : kOps) {
      if (t.text == text) {
        c.op = op;
        found = true;
      }
    }
  }
  if (!found) {
    p.fail("expected comparison operator but found " + LineParser::describe(t));
  }
  p.next();
  c.rhs = parse_expr(p, kind);
  return c;
}

// Parses an instruction that begins with a register assignment `r = ...`.
Instruction parse_assignment(LineParser& p, ThreadKind& kind) {
  Instruction ins;
  std::string dest = p.name("register");
  p.expect_punct("=");
  ins.dest = kind.intern_register(dest);
  if (p.peek_word("load")) {
    p.next();
    ins.op = Opcode::kLoad;
    ins.symbol = p.name("shared variable");
  } else if (p.peek_word("nondet")) {
    p.next();
    p.expect_punct("(");
    p.expect_punct(")");
    ins.op = Opcode::kNondet;
  } else if (p.peek_word("create")) {
    p.next();
    ins.op = Opcode::kCreate;
    ins.symbol = p.name("thread kind");
  } else if (p.peek_word("alloc")) {
    p.next();
    ins.op = Opcode::kAlloc;
    ins.value = parse_expr(p, kind);
  } else if (p.peek_word("hload")) {
    p.next();
    ins.op = Opcode::kHeapLoad;
    ins.handle = kind.intern_register(p.name("register"));
    p.expect_punct("[");
    ins.index = parse_expr(p, kind);
    p.expect_punct("]");
  } else {
    ins.op = Opcode::kAssign;
    ins.value = parse_expr(p, kind);
  }
  return ins;
}

Instruction parse_instruction(LineParser& p, ThreadKind& kind) {
  Instruction ins;
  const Token& head = p.peek();
  if (head.kind != Tok::kIdent) {
    p.fail("expected instruction but found " + LineParser::describe(head));
  }
  const std::string word = head.text;
  if (!is_keyword(word)) return parse_assignment(p, kind);
  p.next();
  if (word == "return") {
    ins.op = Opcode::kReturn;
  } else if (word == "error") {
    ins.op = Opcode::kError;
  } else if (word == "atomic_begin") {
    ins.op = Opcode::kAtomicBegin;
  } else if (word == "atomic_end") {
    ins.op = Opcode::kAtomicEnd;
  } else if (word == "goto") {
    ins.op = Opcode::kGoto;
    ins.symbol = p.name("label");
  } else if (word == "if") {
    ins.op = Opcode::kBranch;
    ins.cond = parse_cond(p, kind);
    p.expect_word("goto");
    ins.symbol = p.name("label");
  } else if (word == "assume" || word == "assert") {
    ins.op = word == "assume" ? Opcode::kAssume : Opcode::kAssert;
    ins.cond = parse_cond(p, kind);
  } else if (word == "lock" || word == "unlock") {
    ins.op = word == "lock" ? Opcode::kLock : Opcode::kUnlock;
    ins.symbol = p.name("mutex");
  } else if (word == "join" || word == "free") {
    ins.op = word == "join" ? Opcode::kJoin : Opcode::kFree;
    ins.handle = kind.intern_register(p.name("register"));
  } else if (word == "store") {
    ins.op = Opcode::kStore;
    ins.symbol = p.name("shared variable");
    ins.value = parse_expr(p, kind);
  } else if (word == "hstore") {
    ins.op = Opcode::kHeapStore;
    ins.handle = kind.intern_register(p.name("register"));
    p.expect_punct("[");
    ins.index = parse_expr(p, kind);
    p.expect_punct("]");
    ins.value = parse_expr(p, kind);
  } else {
    p.fail("'" + word + "' cannot start an instruction", head.column);
  }
  return ins;
}

}  // namespace

Program parse_program(std::string_view text) {
  Program program;
  program.entry = "main";
  ThreadKind* current = nullptr;
  std::vector<std::pair<std::string, int>> pending_labels;
  // Source line of each label, used for "unresolved/dangling" diagnostics.
  std::vector<std::vector<int>> label_lines;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    LineParser p(line, line_no);
    if (p.at_end()) {
      if (end == text.size()) break;
      continue;
    }

    if (p.peek_word("shared")) {
      p.next();
      SharedVar var;
      var.name = p.name("shared variable");
      p.expect_punct("=");
      var.init = p.integer();
      p.expect_end();
      program.shared.push_back(std::move(var));
    } else if (p.peek_word("mutex")) {
      p.next();
      program.mutexes.push_back(p.name("mutex"));
      p.expect_end();
    } else if (p.peek_word("thread")) {
      p.next();
      ThreadKind kind;
      kind.name = p.name("thread kind");
      p.expect_punct(":");
      p.expect_end();
      program.threads.push_back(std::move(kind));
      current = &program.threads.back();
    } else if (p.peek().kind == Tok::kIdent && !is_keyword(p.peek().text) &&
               p.peek_punct(":", 1)) {
      if (current == nullptr) p.fail("label outside of a thread body");
      std::string label = p.next().text;
      p.next();
      p.expect_end();
      current->labels.emplace_back(label,
                                   static_cast<int>(current->body.size()));
    } else {
      if (current == nullptr) p.fail("instruction outside of a thread body");
      Instruction ins = parse_instruction(p, *current);
      p.expect_end();
      current->body.push_back(std::move(ins));
      current->lines.push_back(line_no);
    }
    if (end == text.size()) break;
  }

  link(program);
  std::vector<Diagnostic> diags = validate(program);
  if (!diags.empty()) throw ParseError(std::move(diags));
  return program;
}

void link(Program& program) {
  for (auto& kind : program.threads) {
    for (auto& ins : kind.body) {
      switch (ins.op) {
        case Opcode::kLoad:
        case Opcode::kStore:
          ins.target = program.find_shared(ins.symbol);
          break;
        case Opcode::kLock:
        case Opcode::kUnlock:
          ins.target = program.find_mutex(ins.symbol);
          break;
        case Opcode::kCreate:
          ins.target = program.find_thread(ins.symbol);
          break;
        case Opcode::kGoto:
        case Opcode::kBranch: {
          int t = kind.find_label(ins.symbol);
          ins.target =
              t >= 0 && t < static_cast<int>(kind.body.size()) ? t : -1;
          break;
        }
        default:
          break;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool terminates_path(Opcode op) {
  return op == Opcode::kReturn || op == Opcode::kError || op == Opcode::kGoto;
}

}  // namespace

std::vector<Diagnostic> validate(const Program& program) {
  std::vector<Diagnostic> out;
  auto diag = [&](int line, std::string msg) {
    out.push_back({line, 0, std::move(msg)});
  };

  if (program.find_thread(program.entry) < 0) {
    diag(1, "no entry thread '" + program.entry + "'");
  }

  for (std::size_t i = 0; i < program.shared.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (program.shared[i].name == program.shared[j].name) {
        diag(0, "duplicate shared variable '" + program.shared[i].name + "'");
      }
    }
    if (program.find_mutex(program.shared[i].name) >= 0) {
      diag(0, "'" + program.shared[i].name +
                  "' is declared both as shared variable and mutex");
    }
  }
  for (std::size_t i = 0; i < program.mutexes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (program.mutexes[i] == program.mutexes[j]) {
        diag(0, "duplicate mutex '" + program.mutexes[i] + "'");
      }
    }
  }

  for (std::size_t k = 0; k < program.threads.size(); ++k) {
    const ThreadKind& kind = program.threads[k];
    for (std::size_t j = 0; j < k; ++j) {
      if (program.threads[j].name == kind.name) {
        diag(kind.line_of(0), "duplicate thread kind '" + kind.name + "'");
      }
    }
    if (kind.body.empty()) {
      diag(0, "thread '" + kind.name + "' has an empty body");
      continue;
    }
    if (!terminates_path(kind.body.back().op)) {
      diag(kind.line_of(kind.body.size() - 1),
           "thread '" + kind.name +
               "' does not end with return, error or goto");
    }

    for (std::size_t i = 0; i < kind.labels.size(); ++i) {
      const auto& [label, index] = kind.labels[i];
      for (std::size_t j = 0; j < i; ++j) {
        if (kind.labels[j].first == label) {
          diag(kind.line_of(std::min<std::size_t>(index, kind.body.size() - 1)),
               "duplicate label '" + label + "' in thread '" + kind.name + "'");
        }
      }
      if (index < 0 || index >= static_cast<int>(kind.body.size())) {
        diag(kind.line_of(kind.body.size() - 1),
             "label '" + label + "' does not precede an instruction");
      }
    }

    for (const auto& reg : kind.registers) {
      if (program.find_shared(reg) >= 0) {
        diag(0, "'" + reg + "' is a shared variable in thread '" + kind.name +
                    "'; use load/store to access it");
      } else if (program.find_mutex(reg) >= 0) {
        diag(0, "mutex '" + reg + "' used as a register in thread '" +
                    kind.name + "'");
      }
    }

    bool in_atomic = false;
    for (std::size_t pc = 0; pc < kind.body.size(); ++pc) {
      const Instruction& ins = kind.body[pc];
      const int line = kind.line_of(pc);
      switch (ins.op) {
        case Opcode::kLoad:
        case Opcode::kStore:
          if (program.find_shared(ins.symbol) < 0) {
            diag(line, "unknown shared variable '" + ins.symbol + "'");
          }
          break;
        case Opcode::kLock:
        case Opcode::kUnlock:
          if (program.find_mutex(ins.symbol) < 0) {
            diag(line, "unknown mutex '" + ins.symbol + "'");
          }
          break;
        case Opcode::kCreate:
          if (program.find_thread(ins.symbol) < 0) {
            diag(line, "unknown thread kind '" + ins.symbol + "'");
          }
          break;
        case Opcode::kGoto:
        case Opcode::kBranch: {
          int t = kind.find_label(ins.symbol);
          if (t < 0) {
            diag(line, "unresolved label '" + ins.symbol + "'");
          }
          break;
        }
        case Opcode::kAtomicBegin:
          if (in_atomic) diag(line, "nested atomic region");
          in_atomic = true;
          break;
        case Opcode::kAtomicEnd:
          if (!in_atomic) diag(line, "atomic_end without atomic_begin");
          in_atomic = false;
          break;
        default:
          break;
      }
      const bool needs_dest =
          ins.op == Opcode::kAssign || ins.op == Opcode::kLoad ||
          ins.op == Opcode::kNondet || ins.op == Opcode::kCreate ||
          ins.op == Opcode::kAlloc || ins.op == Opcode::kHeapLoad;
      const bool needs_handle =
          ins.op == Opcode::kJoin || ins.op == Opcode::kFree ||
          ins.op == Opcode::kHeapLoad || ins.op == Opcode::kHeapStore;
      const int nregs = static_cast<int>(kind.registers.size());
      if (needs_dest && (ins.dest < 0 || ins.dest >= nregs)) {
        diag(line, "missing destination register");
      }
      if (needs_handle && (ins.handle < 0 || ins.handle >= nregs)) {
        diag(line, "missing handle register");
      }
      for (const Expr* e : {&ins.value, &ins.index, &ins.cond.lhs,
                            &ins.cond.rhs}) {
        if (e->ops.size() + (e->terms.empty() ? 0 : 1) != e->terms.size()) {
          diag(line, "malformed expression");
        }
        for (const auto& t : e->terms) {
          if (t.is_register && (t.reg < 0 || t.reg >= nregs)) {
            diag(line, "expression references an undeclared register");
          }
        }
        for (char op : e->ops) {
          if (op != '+' && op != '-' && op != '*') {
            diag(line, "unknown arithmetic operator");
          }
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return a.line < b.line;
                   });
  return out;
}

// ---------------------------------------------------------------------------
// Printing

std::string to_text(const Expr& e, const ThreadKind& kind) {
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    if (i > 0) {
      out += ' ';
      out += e.ops[i - 1];
      out += ' ';
    }
    const Term& t = e.terms[i];
    if (t.is_register) {
      out += t.reg >= 0 && t.reg < static_cast<int>(kind.registers.size())
                 ? kind.registers[t.reg]
                 : "?";
    } else {
      out += std::to_string(t.constant);
    }
  }
  return out;
}

std::string to_text(const Condition& c, const ThreadKind& kind) {
  return to_text(c.lhs, kind) + " " + std::string(cmp_name(c.op)) + " " +
         to_text(c.rhs, kind);
}

std::string to_text(const Instruction& ins, const ThreadKind& kind) {
  auto reg = [&](int r) {
    return r >= 0 && r < static_cast<int>(kind.registers.size())
               ? kind.registers[r]
               : std::string("?");
  };
  switch (ins.op) {
    case Opcode::kAssign: return reg(ins.dest) + " = " + to_text(ins.value, kind);
    case Opcode::kLoad: return reg(ins.dest) + " = load " + ins.symbol;
    case Opcode::kStore: return "store " + ins.symbol + " " + to_text(ins.value, kind);
    case Opcode::kNondet: return reg(ins.dest) + " = nondet()";
    case Opcode::kCreate: return reg(ins.dest) + " = create " + ins.symbol;
    case Opcode::kJoin: return "join " + reg(ins.handle);
    case Opcode::kLock: return "lock " + ins.symbol;
    case Opcode::kUnlock: return "unlock " + ins.symbol;
    case Opcode::kAtomicBegin: return "atomic_begin";
    case Opcode::kAtomicEnd: return "atomic_end";
    case Opcode::kAssume: return "assume " + to_text(ins.cond, kind);
    case Opcode::kAssert: return "assert " + to_text(ins.cond, kind);
    case Opcode::kError: return "error";
    case Opcode::kGoto: return "goto " + ins.symbol;
    case Opcode::kBranch:
      return "if " + to_text(ins.cond, kind) + " goto " + ins.symbol;
    case Opcode::kAlloc: return reg(ins.dest) + " = alloc " + to_text(ins.value, kind);
    case Opcode::kFree: return "free " + reg(ins.handle);
    case Opcode::kHeapLoad:
      return reg(ins.dest) + " = hload " + reg(ins.handle) + "[" +
             to_text(ins.index, kind) + "]";
    case Opcode::kHeapStore:
      return "hstore " + reg(ins.handle) + "[" + to_text(ins.index, kind) +
             "] " + to_text(ins.value, kind);
    case Opcode::kReturn: return "return";
  }
  return "?";
}

std::string to_text(const Program& program) {
  std::string out;
  for (const auto& v : program.shared) {
    out += "shared " + v.name + " = " + std::to_string(v.init) + "\n";
  }
  for (const auto& m : program.mutexes) out += "mutex " + m + "\n";
  for (const auto& kind : program.threads) {
    if (!out.empty()) out += "\n";
    out += "thread " + kind.name + ":\n";
    // Registers are interned in order of first textual appearance. Declaring
    // none up front keeps the canonical text free of extra syntax, so the
    // printer must emit instructions in the same order they were parsed.
    for (std::size_t pc = 0; pc <= kind.body.size(); ++pc) {
      for (const auto& [label, index] : kind.labels) {
        if (index == static_cast<int>(pc)) out += label + ":\n";
      }
      if (pc < kind.body.size()) {
        out += "  " + to_text(kind.body[pc], kind) + "\n";
      }
    }
  }
  return out;
}

std::uint64_t fingerprint(const Program& program) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text(program)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint_hex(const Program& program) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fingerprint(program)));
  return buf;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

inline Value term_value(const Term& t, const std::vector<Value>& regs) {
  return t.is_register ? regs[t.reg] : t.constant;
}

inline Value wrap_add(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint64_t>(a) +
                            static_cast<std::uint64_t>(b));
}
inline Value wrap_sub(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint64_t>(a) -
                            static_cast<std::uint64_t>(b));
}
inline Value wrap_mul(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint64_t>(a) *
                            static_cast<std::uint64_t>(b));
}

}  // namespace

Value evaluate(const Expr& e, const std::vector<Value>& regs) {
  if (e.terms.empty()) return 0;
  // sum of signed products
  Value sum = 0;
  Value product = term_value(e.terms[0], regs);
  bool negate = false;
  for (std::size_t i = 0; i < e.ops.size(); ++i) {
    Value t = term_value(e.terms[i + 1], regs);
    if (e.ops[i] == '*') {
      product = wrap_mul(product, t);
      continue;
    }
    sum = negate ? wrap_sub(sum, product) : wrap_add(sum, product);
    negate = e.ops[i] == '-';
    product = t;
  }
  return negate ? wrap_sub(sum, product) : wrap_add(sum, product);
}

bool evaluate(const Condition& c, const std::vector<Value>& regs) {
  Value l = evaluate(c.lhs, regs);
  Value r = evaluate(c.rhs, regs);
  switch (c.op) {
    case CmpOp::kEq: return l == r;
    case CmpOp::kNe: return l != r;
    case CmpOp::kLt: return l < r;
    case CmpOp::kLe: return l <= r;
    case CmpOp::kGt: return l > r;
    case CmpOp::kGe: return l >= r;
  }
  return false;
}

}  // namespace ebf
