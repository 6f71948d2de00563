// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Supported assertion fragment:
//
//   [label:] assert property (@(posedge|negedge clk) [seq (|->|=>)] seq);
//   seq   := [delay] term (delay term)*
//   term  := expr ['[*' k ']']
//   delay := '##' n | '##[' m ':' n ']'
//
// `|=>` is stored as `|->` with the consequent's first delay shifted by one.
// The bounded temporal mini-language (F[a:b], G[a:b], X, &&, ||, !, =>) used
// by timing-diagram analysis lives here as well.

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specsva/expr.hpp"
#include "specsva/trace.hpp"

namespace specsva {

struct DelayRange {
  int min = 0;
  int max = 0;
  friend bool operator==(const DelayRange&, const DelayRange&) = default;
};

struct SeqTerm {
  DelayRange delay;  // relative to the previous term's end (or the start)
  Expr expr;
  int repeat = 1;
  friend bool operator==(const SeqTerm&, const SeqTerm&) = default;
};

struct Sequence {
  std::vector<SeqTerm> terms;
  /// Upper bound on (end cycle - start cycle) of any match.
  int max_span() const;
  friend bool operator==(const Sequence&, const Sequence&) = default;
};

enum class ClockEdge { Posedge, Negedge };

struct SvaAst {
  std::string label;
  ClockEdge edge = ClockEdge::Posedge;
  std::string clock = "clk";
  std::optional<Sequence> antecedent;  // absent: the consequent must match every cycle
  Sequence consequent;

  std::vector<std::string> signals() const;
  friend bool operator==(const SvaAst&, const SvaAst&) = default;
};

/// Throws SyntaxError with the offending offset and expected token.
SvaAst parse_sva(std::string_view text);
std::string render_sva(const SvaAst& ast);
/// Parses a bare sequence such as "##[2:4] read_valid[*2]".
Sequence parse_sequence_text(std::string_view text);
std::string render_sequence(const Sequence& seq, bool parenthesize_compound = false);

/// Whitespace-free form, used to compare assertion text modulo spacing.
std::string normalize_whitespace(std::string_view text);

struct Verdict {
  enum class Kind { Pass, VacuousPass, Fail };
  Kind kind = Kind::Pass;
  std::size_t fail_cycle = 0;  // valid for Fail

  static Verdict pass() { return {Kind::Pass, 0}; }
  static Verdict vacuous() { return {Kind::VacuousPass, 0}; }
  static Verdict fail(std::size_t cycle) { return {Kind::Fail, cycle}; }
  bool failed() const { return kind == Kind::Fail; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

std::string to_string(const Verdict& v);

struct EvalOptions {
  /// Only evaluate start cycles whose worst-case obligation window fits in
  /// the trace. Off by default: obligations running past the end fail.
  bool complete_windows_only = false;
};

/// Named constants (e.g. localparams) visible to assertion expressions.
using ConstantTable = std::vector<std::pair<std::string, Binding>>;

/// An assertion compiled against a trace layout. Reusable across traces
/// that share signal names and order.
class BoundAssertion {
 public:
  BoundAssertion(const SvaAst& ast, const std::vector<std::string>& names,
                 const std::vector<int>& widths, const ConstantTable& constants = {});

  Verdict eval(const Trace& trace, const EvalOptions& opts = {}) const;
  /// Verdict for the single start cycle `t`; VacuousPass when the
  /// antecedent does not match there.
  Verdict eval_at(const Trace& trace, std::size_t t) const;
  /// True when the antecedent matched at `t` (for vacuity bookkeeping).
  bool fires_at(const Trace& trace, std::size_t t) const;
  int total_span() const { return total_span_; }
  bool has_antecedent() const { return !antecedent_.empty(); }

 private:
  struct Term {
    DelayRange delay;
    CompiledExpr expr;
    int repeat;
  };
  using CompiledSeq = std::vector<Term>;

  static CompiledSeq compile(const Sequence& seq, const Resolver& resolve);
  /// Marks every cycle at which a match of `seq` starting at `start` ends.
  static void ends(const CompiledSeq& seq, const Trace& trace, std::size_t start,
                   std::vector<char>& out);
  static bool any_match(const CompiledSeq& seq, const Trace& trace, std::size_t start);
  /// Fail / Pass / Vacuous for one start cycle; vacuous when nothing fires.
  Verdict check_start(const Trace& trace, std::size_t t) const;

  CompiledSeq antecedent_;
  CompiledSeq consequent_;
  int total_span_ = 0;
};

/// Pessimistic finite-trace semantics. Throws UnknownSignal.
Verdict eval_sva(const SvaAst& ast, const Trace& trace, const ConstantTable& constants = {},
                 const EvalOptions& opts = {});

// ---------------------------------------------------------------------------
// Bounded temporal formulas.

struct TemporalFormula {
  enum class Kind { Atom, Not, And, Or, Implies, Eventually, Always, Next };
  Kind kind = Kind::Atom;
  Expr atom;
  int lo = 0;
  int hi = 0;
  std::vector<TemporalFormula> args;

  friend bool operator==(const TemporalFormula&, const TemporalFormula&) = default;
};

TemporalFormula parse_temporal(std::string_view text);
std::string render_temporal(const TemporalFormula& f);
/// Atoms beyond the trace end are false, so F-windows that cannot be
/// fulfilled and truncated G-windows both evaluate to false.
bool eval_temporal(const TemporalFormula& f, const Trace& trace, std::size_t at,
                   const ConstantTable& constants = {});

/// `trigger => F[a:b] s [&& G[0:h] s]` (or `F[a:b](s && G[0:h] s)`, or
/// `X s`) to `trigger |-> ##[a:b] s[*h+1]`. Throws UnsupportedShape.
SvaAst tl_to_sva(const TemporalFormula& constraint, const std::string& clock = "clk");

// ---------------------------------------------------------------------------
// Assertion files: one assertion per line, `//` comments and blank lines
// ignored.

struct AssertionEntry {
  std::string id;
  std::string text;
  std::optional<SvaAst> ast;  // empty when the line does not parse
  std::string parse_error;
};

std::vector<AssertionEntry> parse_assertion_file(std::string_view text);
std::string write_assertion_file(const std::vector<AssertionEntry>& entries,
                                 std::string_view header_comment = {});

}  // namespace specsva
