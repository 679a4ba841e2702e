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

#include <charconv>
#include <set>
#include <sstream>

#include "ebf/exec.h"

namespace ebf {

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_prefixed(std::string_view s, char prefix, int& out) {
  if (s.size() < 2 || s[0] != prefix) return false;
  return parse_int(s.substr(1), out) && out >= 0;
}

bool is_hex16(std::string_view s) {
  if (s.size() != 16) return false;
  for (char c : s) {
    const bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!hex) return false;
  }
  return true;
}

struct Printer {
  std::ostringstream& out;

  void operator()(const event::Decl& e) {
    out << "DECL " << e.name << ' ' << e.function << " #" << e.addr << '\n';
  }
  void operator()(const event::Store& e) {
    out << "STORE #" << e.addr << ' ' << e.line << ' ' << e.function << ' '
        << e.value << '\n';
  }
  void operator()(const event::Sched& e) {
    out << "SCHED " << e.tick << " t" << e.thread << '\n';
  }
  void operator()(const event::Input& e) { out << "INPUT " << e.value << '\n'; }
  void operator()(const event::Create& e) {
    out << "CREATE t" << e.parent << " t" << e.child << '\n';
  }
  void operator()(const event::Join& e) {
    out << "JOIN t" << e.parent << " t" << e.child << '\n';
  }
  void operator()(const event::Finding& e) {
    out << "FINDING " << to_string(e.kind) << ' ' << e.location.str() << ' '
        << e.tick << '\n';
  }
};

std::optional<WitnessEvent> parse_event(
    const std::vector<std::string_view>& w) {
  const std::string_view tag = w[0];
  if (tag == "DECL" && w.size() == 4) {
    event::Decl e{std::string(w[1]), std::string(w[2]), 0};
    if (!parse_prefixed(w[3], '#', e.addr)) return std::nullopt;
    return e;
  }
  if (tag == "STORE" && w.size() == 5) {
    event::Store e;
    e.function = std::string(w[3]);
    if (!parse_prefixed(w[1], '#', e.addr) || !parse_int(w[2], e.line) ||
        !parse_int(w[4], e.value)) {
      return std::nullopt;
    }
    return e;
  }
  if (tag == "SCHED" && w.size() == 3) {
    event::Sched e;
    if (!parse_int(w[1], e.tick) || !parse_prefixed(w[2], 't', e.thread)) {
      return std::nullopt;
    }
    return e;
  }
  if (tag == "INPUT" && w.size() == 2) {
    event::Input e;
    if (!parse_int(w[1], e.value)) return std::nullopt;
    return e;
  }
  if ((tag == "CREATE" || tag == "JOIN") && w.size() == 3) {
    int parent = 0;
    int child = 0;
    if (!parse_prefixed(w[1], 't', parent) ||
        !parse_prefixed(w[2], 't', child)) {
      return std::nullopt;
    }
    if (tag == "CREATE") return event::Create{parent, child};
    return event::Join{parent, child};
  }
  if (tag == "FINDING" && w.size() == 4) {
    event::Finding e;
    const auto kind = parse_bug_kind(w[1]);
    const auto loc = Location::parse(w[2]);
    if (!kind || !loc || !parse_int(w[3], e.tick)) return std::nullopt;
    e.kind = *kind;
    e.location = *loc;
    return e;
  }
  return std::nullopt;
}

}  // namespace

WitnessFormatError::WitnessFormatError(int line, const std::string& message)
    : std::runtime_error("witness line " + std::to_string(line) + ": " +
                         message),
      line_(line) {}

std::vector<event::Finding> CrashReport::findings() const {
  std::vector<event::Finding> out;
  for (const auto& e : events) {
    if (const auto* f = std::get_if<event::Finding>(&e)) out.push_back(*f);
  }
  return out;
}

std::vector<int> CrashReport::schedule() const {
  std::vector<int> out;
  for (const auto& e : events) {
    if (const auto* s = std::get_if<event::Sched>(&e)) out.push_back(s->thread);
  }
  return out;
}

std::vector<Value> CrashReport::inputs() const {
  std::vector<Value> out;
  for (const auto& e : events) {
    if (const auto* i = std::get_if<event::Input>(&e)) out.push_back(i->value);
  }
  return out;
}

std::string serialize(const CrashReport& report) {
  std::ostringstream out;
  out << "run " << report.run_id << '\n';
  out << "program " << report.program_hash << '\n';
  if (!report.config.empty()) out << "config " << report.config << '\n';
  Printer printer{out};
  for (const auto& e : report.events) std::visit(printer, e);
  return out.str();
}

CrashReport deserialize(std::string_view text) {
  CrashReport report;
  int line_no = 0;
  bool have_run = false;
  bool have_program = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (!have_run) {
      if (line.substr(0, 4) != "run " || line.size() == 4) {
        throw WitnessFormatError(line_no, "expected 'run <id>'");
      }
      report.run_id = std::string(line.substr(4));
      have_run = true;
      continue;
    }
    if (!have_program) {
      const auto w = split_words(line);
      if (w.size() != 2 || w[0] != "program" || !is_hex16(w[1])) {
        throw WitnessFormatError(line_no, "expected 'program <16 hex digits>'");
      }
      report.program_hash = std::string(w[1]);
      have_program = true;
      continue;
    }
    if (line.substr(0, 7) == "config " && report.events.empty() &&
        report.config.empty()) {
      report.config = std::string(line.substr(7));
      continue;
    }
    const auto w = split_words(line);
    auto e = parse_event(w);
    if (!e) {
      throw WitnessFormatError(line_no,
                               "malformed event '" + std::string(line) + "'");
    }
    report.events.push_back(std::move(*e));
  }
  if (!have_run) throw WitnessFormatError(line_no + 1, "missing 'run' header");
  if (!have_program) {
    throw WitnessFormatError(line_no + 1, "missing 'program' header");
  }
  return report;
}

std::optional<std::string> check_well_formed(const CrashReport& report) {
  if (report.run_id.empty()) return "empty run id";
  if (!is_hex16(report.program_hash)) return "program hash is not 16 hex digits";
  std::set<int> declared;
  for (std::size_t i = 0; i < report.events.size(); ++i) {
    const auto& e = report.events[i];
    if (const auto* d = std::get_if<event::Decl>(&e)) {
      if (!declared.insert(d->addr).second) {
        return "event " + std::to_string(i) + ": address #" +
               std::to_string(d->addr) + " declared twice";
      }
    } else if (const auto* s = std::get_if<event::Store>(&e)) {
      if (!declared.count(s->addr)) {
        return "event " + std::to_string(i) + ": STORE to undeclared #" +
               std::to_string(s->addr);
      }
    }
  }
  if (report.events.empty() ||
      !std::holds_alternative<event::Finding>(report.events.back())) {
    return "report does not end in a FINDING";
  }
  return std::nullopt;
}

std::optional<CrashReport> record(const Program& program,
                                  const ExecOutcome& outcome,
                                  std::string run_id, std::string config) {
  if (outcome.status != ExecStatus::kBugFound || outcome.events.empty()) {
    return std::nullopt;
  }
  CrashReport report;
  report.run_id = std::move(run_id);
  report.program_hash = fingerprint_hex(program);
  report.config = std::move(config);
  report.events = outcome.events;
  return report;
}

ExecOutcome replay(const Program& program, const CrashReport& report,
                   const ExecConfig& config) {
  if (fingerprint_hex(program) != report.program_hash) {
    throw ReplayError("program fingerprint " + fingerprint_hex(program) +
                      " does not match report " + report.program_hash);
  }
  const auto schedule = report.schedule();
  const auto inputs = report.inputs();
  try {
    return run_schedule(program, inputs, schedule, config);
  } catch (const InfeasibleSchedule& e) {
    throw ReplayError(std::string("infeasible schedule: ") + e.what());
  }
}

ExecOutcome replay(const Program& program, const CrashReport& report) {
  ExecConfig config;
  for (auto word : split_words(report.config)) {
    if (word.substr(0, 10) != "detectors=") continue;
    if (auto set = DetectorSet::parse(word.substr(10))) config.detectors = *set;
  }
  return replay(program, report, config);
}

bool reproduces(const CrashReport& report, const ExecOutcome& outcome) {
  const auto expected = report.findings();
  if (expected.empty()) return false;
  std::size_t j = 0;
  for (const auto& f : outcome.findings) {
    if (j < expected.size() && f.kind == expected[j].kind &&
        f.location == expected[j].location) {
      ++j;
    }
  }
  return j == expected.size();
}

}  // namespace ebf
