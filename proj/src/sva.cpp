// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/sva.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/util.hpp"

namespace specsva {

namespace {

ExprParseOptions sva_expr_options() {
  ExprParseOptions o;
  o.allow_system_calls = true;
  o.stop_at_repetition = true;
  return o;
}

int expect_int(TokenCursor& cur, std::string_view what) {
  const Token& t = cur.expect(Tok::Number, what);
  return static_cast<int>(t.value);
}

DelayRange parse_delay(TokenCursor& cur) {
  cur.expect(Tok::HashHash, "'##'");
  DelayRange d;
  if (cur.accept(Tok::LBracket)) {
    std::size_t pos = cur.peek().pos;
    d.min = expect_int(cur, "delay lower bound");
    cur.expect(Tok::Colon, "':' in delay range");
    d.max = expect_int(cur, "delay upper bound (unbounded ranges are not supported)");
    cur.expect(Tok::RBracket, "']'");
    if (d.min > d.max)
      throw Error(ErrorKind::SyntaxError,
                  fmt::format("at offset {}: delay range [{}:{}] has min > max", pos, d.min, d.max),
                  pos);
  } else {
    d.min = d.max = expect_int(cur, "delay count or '['");
  }
  return d;
}

SeqTerm parse_term(TokenCursor& cur, DelayRange delay) {
  SeqTerm term;
  term.delay = delay;
  term.expr = parse_expression(cur, sva_expr_options());
  if (cur.at(Tok::LBracket) && cur.at(Tok::Star, 1)) {
    cur.advance();
    cur.advance();
    std::size_t pos = cur.peek().pos;
    term.repeat = expect_int(cur, "repetition count");
    if (cur.at(Tok::Colon)) cur.fail("']' (ranged repetition is not supported)");
    cur.expect(Tok::RBracket, "']'");
    if (term.repeat < 1)
      throw Error(ErrorKind::SyntaxError,
                  fmt::format("at offset {}: repetition count must be >= 1", pos), pos);
  }
  return term;
}

Sequence parse_sequence(TokenCursor& cur) {
  Sequence seq;
  DelayRange delay{0, 0};
  if (cur.at(Tok::HashHash)) delay = parse_delay(cur);
  for (;;) {
    seq.terms.push_back(parse_term(cur, delay));
    if (!cur.at(Tok::HashHash)) break;
    delay = parse_delay(cur);
  }
  return seq;
}

std::string render_delay(const DelayRange& d) {
  if (d.min == d.max) return fmt::format("##{}", d.min);
  return fmt::format("##[{}:{}]", d.min, d.max);
}

bool is_primary(const Expr& e) {
  return e.kind != ExprKind::Binary && e.kind != ExprKind::Ternary && e.kind != ExprKind::Unary;
}

}  // namespace

int Sequence::max_span() const {
  int span = 0;
  for (const auto& t : terms) span += t.delay.max + t.repeat - 1;
  return span;
}

std::vector<std::string> SvaAst::signals() const {
  std::vector<std::string> out;
  if (antecedent)
    for (const auto& t : antecedent->terms) collect_identifiers(t.expr, out);
  for (const auto& t : consequent.terms) collect_identifiers(t.expr, out);
  return out;
}

SvaAst parse_sva(std::string_view text) {
  TokenCursor cur(tokenize(text));
  SvaAst ast;
  if (cur.at(Tok::Ident) && cur.at(Tok::Colon, 1) && !cur.at_ident("assert")) {
    ast.label = cur.advance().text;
    cur.advance();
  }
  cur.expect_ident("assert");
  cur.expect_ident("property");
  cur.expect(Tok::LParen, "'(' after 'assert property'");
  cur.expect(Tok::At, "clocking event '@(...)'");
  cur.expect(Tok::LParen, "'(' in clocking event");
  if (cur.at_ident("posedge")) {
    ast.edge = ClockEdge::Posedge;
  } else if (cur.at_ident("negedge")) {
    ast.edge = ClockEdge::Negedge;
  } else {
    cur.fail("'posedge' or 'negedge'");
  }
  cur.advance();
  ast.clock = cur.expect(Tok::Ident, "clock signal").text;
  cur.expect(Tok::RParen, "')' closing clocking event");

  Sequence first = parse_sequence(cur);
  if (cur.at(Tok::OverlapImpl) || cur.at(Tok::NonOverlapImpl)) {
    bool non_overlapping = cur.advance().kind == Tok::NonOverlapImpl;
    ast.antecedent = std::move(first);
    ast.consequent = parse_sequence(cur);
    if (non_overlapping) {
      ast.consequent.terms.front().delay.min += 1;
      ast.consequent.terms.front().delay.max += 1;
    }
  } else {
    ast.consequent = std::move(first);
  }
  cur.expect(Tok::RParen, "')' closing 'assert property ('");
  cur.accept(Tok::Semi);
  if (!cur.at(Tok::End)) cur.fail("end of assertion");
  return ast;
}

Sequence parse_sequence_text(std::string_view text) {
  TokenCursor cur(tokenize(text));
  Sequence seq = parse_sequence(cur);
  if (!cur.at(Tok::End)) cur.fail("end of sequence");
  return seq;
}

std::string render_sequence(const Sequence& seq, bool parenthesize_compound) {
  std::string out;
  for (std::size_t i = 0; i < seq.terms.size(); ++i) {
    const auto& t = seq.terms[i];
    if (i > 0) {
      out += " " + render_delay(t.delay) + " ";
    } else if (t.delay.max > 0) {
      out += render_delay(t.delay) + " ";
    }
    bool wrap = (t.repeat > 1 || parenthesize_compound) && !is_primary(t.expr);
    out += wrap ? "(" + render_expr(t.expr) + ")" : render_expr(t.expr);
    if (t.repeat > 1) out += fmt::format("[*{}]", t.repeat);
  }
  return out;
}

std::string render_sva(const SvaAst& ast) {
  std::string out;
  if (!ast.label.empty()) out += ast.label + ": ";
  out += fmt::format("assert property (@({} {}) ",
                     ast.edge == ClockEdge::Posedge ? "posedge" : "negedge", ast.clock);
  if (ast.antecedent) out += render_sequence(*ast.antecedent, true) + " |-> ";
  out += render_sequence(ast.consequent) + ");";
  return out;
}

std::string normalize_whitespace(std::string_view text) { return util::strip_whitespace(text); }

std::string to_string(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Pass: return "Pass";
    case Verdict::Kind::VacuousPass: return "VacuousPass";
    case Verdict::Kind::Fail: return fmt::format("Fail({})", v.fail_cycle);
  }
  return "?";
}

BoundAssertion::BoundAssertion(const SvaAst& ast, const std::vector<std::string>& names,
                               const std::vector<int>& widths, const ConstantTable& constants) {
  Resolver resolve = [&](const std::string& name) -> std::optional<Binding> {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return Binding{static_cast<int>(i), 0, widths[i]};
    for (const auto& [cname, binding] : constants)
      if (cname == name) return binding;
    return std::nullopt;
  };
  if (ast.antecedent) antecedent_ = compile(*ast.antecedent, resolve);
  consequent_ = compile(ast.consequent, resolve);
  total_span_ = (ast.antecedent ? ast.antecedent->max_span() : 0) + ast.consequent.max_span();
}

BoundAssertion::CompiledSeq BoundAssertion::compile(const Sequence& seq, const Resolver& resolve) {
  CompiledSeq out;
  for (const auto& t : seq.terms) out.push_back({t.delay, CompiledExpr::compile(t.expr, resolve), t.repeat});
  return out;
}

namespace {

bool holds_at(const CompiledExpr& expr, const Trace& trace, std::size_t cycle) {
  auto read = [&](int slot, int offset) -> std::uint64_t {
    auto c = static_cast<long long>(cycle) + offset;
    return c < 0 ? 0 : trace.at(slot, static_cast<std::size_t>(c));
  };
  return expr.eval(read) != 0;
}

}  // namespace

void BoundAssertion::ends(const CompiledSeq& seq, const Trace& trace, std::size_t start,
                          std::vector<char>& out) {
  const std::size_t len = trace.length();
  std::vector<char> anchors(len, 0);
  std::vector<char> next(len, 0);
  if (start >= len) {
    out.assign(len, 0);
    return;
  }
  anchors[start] = 1;
  for (const auto& term : seq) {
    std::fill(next.begin(), next.end(), 0);
    bool any = false;
    for (std::size_t a = 0; a < len; ++a) {
      if (!anchors[a]) continue;
      for (int d = term.delay.min; d <= term.delay.max; ++d) {
        std::size_t s = a + static_cast<std::size_t>(d);
        std::size_t e = s + static_cast<std::size_t>(term.repeat) - 1;
        if (e >= len) break;
        if (next[e]) continue;
        bool ok = true;
        for (std::size_t c = s; c <= e && ok; ++c) ok = holds_at(term.expr, trace, c);
        if (ok) {
          next[e] = 1;
          any = true;
        }
      }
    }
    anchors.swap(next);
    if (!any) break;
  }
  out = std::move(anchors);
}

bool BoundAssertion::any_match(const CompiledSeq& seq, const Trace& trace, std::size_t start) {
  // Single-term consequents are the common case; avoid the set machinery.
  if (seq.size() == 1) {
    const auto& term = seq.front();
    for (int d = term.delay.min; d <= term.delay.max; ++d) {
      std::size_t s = start + static_cast<std::size_t>(d);
      std::size_t e = s + static_cast<std::size_t>(term.repeat) - 1;
      if (e >= trace.length()) return false;
      bool ok = true;
      for (std::size_t c = s; c <= e && ok; ++c) ok = holds_at(term.expr, trace, c);
      if (ok) return true;
    }
    return false;
  }
  std::vector<char> e;
  ends(seq, trace, start, e);
  return std::any_of(e.begin(), e.end(), [](char c) { return c != 0; });
}

Verdict BoundAssertion::check_start(const Trace& trace, std::size_t t) const {
  if (antecedent_.empty()) return any_match(consequent_, trace, t) ? Verdict::pass() : Verdict::fail(t);
  bool fired = false;
  if (antecedent_.size() == 1 && antecedent_.front().delay.max == 0 &&
      antecedent_.front().repeat == 1) {
    if (!holds_at(antecedent_.front().expr, trace, t)) return Verdict::vacuous();
    return any_match(consequent_, trace, t) ? Verdict::pass() : Verdict::fail(t);
  }
  std::vector<char> e;
  ends(antecedent_, trace, t, e);
  for (std::size_t c = 0; c < e.size(); ++c) {
    if (!e[c]) continue;
    fired = true;
    if (!any_match(consequent_, trace, c)) return Verdict::fail(t);
  }
  return fired ? Verdict::pass() : Verdict::vacuous();
}

bool BoundAssertion::fires_at(const Trace& trace, std::size_t t) const {
  if (antecedent_.empty()) return true;
  std::vector<char> e;
  ends(antecedent_, trace, t, e);
  return std::any_of(e.begin(), e.end(), [](char c) { return c != 0; });
}

Verdict BoundAssertion::eval_at(const Trace& trace, std::size_t t) const { return check_start(trace, t); }

Verdict BoundAssertion::eval(const Trace& trace, const EvalOptions& opts) const {
  const std::size_t len = trace.length();
  std::size_t limit = len;
  if (opts.complete_windows_only) {
    auto span = static_cast<std::size_t>(total_span_);
    limit = span >= len ? 0 : len - span;
  }
  bool fired = false;
  for (std::size_t t = 0; t < limit; ++t) {
    Verdict v = check_start(trace, t);
    if (v.failed()) return v;
    if (v.kind == Verdict::Kind::Pass) fired = true;
  }
  return fired ? Verdict::pass() : Verdict::vacuous();
}

Verdict eval_sva(const SvaAst& ast, const Trace& trace, const ConstantTable& constants,
                 const EvalOptions& opts) {
  BoundAssertion bound(ast, trace.names(), trace.widths(), constants);
  return bound.eval(trace, opts);
}

// ---------------------------------------------------------------------------
// Temporal formulas.

namespace {

using TF = TemporalFormula;

class TemporalParser {
 public:
  explicit TemporalParser(std::string_view text) : cur_(tokenize(text)) {}

  TF parse() {
    TF f = implication();
    if (!cur_.at(Tok::End)) cur_.fail("end of temporal formula");
    return f;
  }

 private:
  TF implication() {
    TF lhs = disjunction();
    if (cur_.accept(Tok::Implies)) {
      TF out;
      out.kind = TF::Kind::Implies;
      out.args.push_back(std::move(lhs));
      out.args.push_back(implication());
      return out;
    }
    return lhs;
  }

  TF disjunction() {
    TF lhs = conjunction();
    while (cur_.accept(Tok::PipePipe)) lhs = binary(TF::Kind::Or, std::move(lhs), conjunction());
    return lhs;
  }

  TF conjunction() {
    TF lhs = unary();
    while (cur_.accept(Tok::AmpAmp)) lhs = binary(TF::Kind::And, std::move(lhs), unary());
    return lhs;
  }

  static TF binary(TF::Kind k, TF a, TF b) {
    TF out;
    out.kind = k;
    out.args.push_back(std::move(a));
    out.args.push_back(std::move(b));
    return out;
  }

  TF unary() {
    if (cur_.accept(Tok::Bang)) {
      TF out;
      out.kind = TF::Kind::Not;
      out.args.push_back(unary());
      return out;
    }
    if ((cur_.at_ident("F") || cur_.at_ident("G")) && cur_.at(Tok::LBracket, 1)) {
      TF out;
      out.kind = cur_.advance().text == "F" ? TF::Kind::Eventually : TF::Kind::Always;
      cur_.advance();
      std::size_t pos = cur_.peek().pos;
      out.lo = expect_int(cur_, "window lower bound");
      cur_.expect(Tok::Colon, "':' in window");
      out.hi = expect_int(cur_, "window upper bound");
      cur_.expect(Tok::RBracket, "']'");
      if (out.lo > out.hi)
        throw Error(ErrorKind::SyntaxError,
                    fmt::format("at offset {}: window [{}:{}] has lower > upper", pos, out.lo, out.hi),
                    pos);
      out.args.push_back(unary());
      return out;
    }
    if (cur_.at_ident("X") &&
        (cur_.at(Tok::Ident, 1) || cur_.at(Tok::LParen, 1) || cur_.at(Tok::Bang, 1))) {
      cur_.advance();
      TF out;
      out.kind = TF::Kind::Next;
      out.args.push_back(unary());
      return out;
    }
    if (cur_.accept(Tok::LParen)) {
      TF inner = implication();
      cur_.expect(Tok::RParen, "')'");
      return inner;
    }
    return atom();
  }

  TF atom() {
    TF out;
    out.kind = TF::Kind::Atom;
    if (cur_.at(Tok::Number)) {
      const Token& n = cur_.advance();
      out.atom = Expr::constant(n.value, n.width, n.base);
      return out;
    }
    Expr lhs = Expr::ident(cur_.expect(Tok::Ident, "signal name").text);
    if (cur_.at(Tok::EqEq) || cur_.at(Tok::BangEq)) {
      Op op = cur_.advance().kind == Tok::EqEq ? Op::Eq : Op::Ne;
      const Token& n = cur_.expect(Tok::Number, "constant");
      lhs = Expr::binary(op, std::move(lhs), Expr::constant(n.value, n.width, n.base));
    }
    out.atom = std::move(lhs);
    return out;
  }

  TokenCursor cur_;
};

std::string render_tf(const TF& f);

std::string wrap_if(const TF& f, std::initializer_list<TF::Kind> kinds) {
  for (auto k : kinds)
    if (f.kind == k) return "(" + render_tf(f) + ")";
  return render_tf(f);
}

std::string render_tf(const TF& f) {
  switch (f.kind) {
    case TF::Kind::Atom: return render_expr(f.atom);
    case TF::Kind::Not:
      return "!" + wrap_if(f.args[0], {TF::Kind::And, TF::Kind::Or, TF::Kind::Implies});
    case TF::Kind::And:
      return wrap_if(f.args[0], {TF::Kind::Or, TF::Kind::Implies}) + " && " +
             wrap_if(f.args[1], {TF::Kind::And, TF::Kind::Or, TF::Kind::Implies});
    case TF::Kind::Or:
      return wrap_if(f.args[0], {TF::Kind::Implies}) + " || " +
             wrap_if(f.args[1], {TF::Kind::Or, TF::Kind::Implies});
    case TF::Kind::Implies:
      return wrap_if(f.args[0], {TF::Kind::Implies}) + " => " + render_tf(f.args[1]);
    case TF::Kind::Eventually:
    case TF::Kind::Always:
      return fmt::format("{}[{}:{}] {}", f.kind == TF::Kind::Eventually ? "F" : "G", f.lo, f.hi,
                         wrap_if(f.args[0], {TF::Kind::And, TF::Kind::Or, TF::Kind::Implies}));
    case TF::Kind::Next:
      return "X " + wrap_if(f.args[0], {TF::Kind::And, TF::Kind::Or, TF::Kind::Implies});
  }
  return {};
}

bool eval_tf(const TF& f, const Trace& trace, std::size_t t, const Resolver& resolve) {
  switch (f.kind) {
    case TF::Kind::Atom: {
      if (t >= trace.length()) return false;
      auto compiled = CompiledExpr::compile(f.atom, resolve);
      return holds_at(compiled, trace, t);
    }
    case TF::Kind::Not: return !eval_tf(f.args[0], trace, t, resolve);
    case TF::Kind::And: return eval_tf(f.args[0], trace, t, resolve) && eval_tf(f.args[1], trace, t, resolve);
    case TF::Kind::Or: return eval_tf(f.args[0], trace, t, resolve) || eval_tf(f.args[1], trace, t, resolve);
    case TF::Kind::Implies:
      return !eval_tf(f.args[0], trace, t, resolve) || eval_tf(f.args[1], trace, t, resolve);
    case TF::Kind::Eventually:
      for (int d = f.lo; d <= f.hi; ++d)
        if (eval_tf(f.args[0], trace, t + static_cast<std::size_t>(d), resolve)) return true;
      return false;
    case TF::Kind::Always:
      for (int d = f.lo; d <= f.hi; ++d)
        if (!eval_tf(f.args[0], trace, t + static_cast<std::size_t>(d), resolve)) return false;
      return true;
    case TF::Kind::Next: return eval_tf(f.args[0], trace, t + 1, resolve);
  }
  return false;
}

bool is_boolean(const TF& f) {
  switch (f.kind) {
    case TF::Kind::Atom: return true;
    case TF::Kind::Not:
    case TF::Kind::And:
    case TF::Kind::Or:
      return std::all_of(f.args.begin(), f.args.end(), is_boolean);
    default: return false;
  }
}

Expr boolean_to_expr(const TF& f) {
  switch (f.kind) {
    case TF::Kind::Atom: return f.atom;
    case TF::Kind::Not: return Expr::unary(Op::LogNot, boolean_to_expr(f.args[0]));
    case TF::Kind::And:
      return Expr::binary(Op::LogAnd, boolean_to_expr(f.args[0]), boolean_to_expr(f.args[1]));
    case TF::Kind::Or:
      return Expr::binary(Op::LogOr, boolean_to_expr(f.args[0]), boolean_to_expr(f.args[1]));
    default: throw Error(ErrorKind::UnsupportedShape, "temporal operator inside boolean position");
  }
}

struct ResponseShape {
  DelayRange window;
  Expr signal;
  int repeat = 1;
};

std::optional<ResponseShape> match_response(const TF& body) {
  auto is_hold = [](const TF& g) {
    return g.kind == TF::Kind::Always && g.lo == 0 && is_boolean(g.args[0]);
  };
  auto is_window = [](const TF& f) {
    return f.kind == TF::Kind::Eventually && is_boolean(f.args[0]);
  };
  if (is_window(body))
    return ResponseShape{{body.lo, body.hi}, boolean_to_expr(body.args[0]), 1};
  if (body.kind == TF::Kind::Next && is_boolean(body.args[0]))
    return ResponseShape{{1, 1}, boolean_to_expr(body.args[0]), 1};
  if (is_hold(body))
    return ResponseShape{{0, 0}, boolean_to_expr(body.args[0]), body.hi + 1};
  if (body.kind == TF::Kind::And) {
    for (int first = 0; first < 2; ++first) {
      const TF& f = body.args[first];
      const TF& g = body.args[1 - first];
      if (is_window(f) && is_hold(g) && f.args[0] == g.args[0])
        return ResponseShape{{f.lo, f.hi}, boolean_to_expr(f.args[0]), g.hi + 1};
    }
  }
  // Anchored form: F[a:b](s && G[0:h] s).
  if (body.kind == TF::Kind::Eventually && body.args[0].kind == TF::Kind::And) {
    const TF& inner = body.args[0];
    for (int first = 0; first < 2; ++first) {
      const TF& s = inner.args[first];
      const TF& g = inner.args[1 - first];
      if (is_boolean(s) && is_hold(g) && g.args[0] == s)
        return ResponseShape{{body.lo, body.hi}, boolean_to_expr(s), g.hi + 1};
    }
  }
  return std::nullopt;
}

}  // namespace

TemporalFormula parse_temporal(std::string_view text) { return TemporalParser(text).parse(); }

std::string render_temporal(const TemporalFormula& f) { return render_tf(f); }

bool eval_temporal(const TemporalFormula& f, const Trace& trace, std::size_t at,
                   const ConstantTable& constants) {
  Resolver resolve = [&](const std::string& name) -> std::optional<Binding> {
    if (auto idx = trace.index_of(name))
      return Binding{*idx, 0, trace.widths()[static_cast<std::size_t>(*idx)]};
    for (const auto& [cname, binding] : constants)
      if (cname == name) return binding;
    return std::nullopt;
  };
  return eval_tf(f, trace, at, resolve);
}

SvaAst tl_to_sva(const TemporalFormula& constraint, const std::string& clock) {
  if (constraint.kind != TF::Kind::Implies)
    throw Error(ErrorKind::UnsupportedShape,
                "expected 'trigger => body', got " + render_temporal(constraint));
  const TF& trigger = constraint.args[0];
  const TF& body = constraint.args[1];
  if (!is_boolean(trigger))
    throw Error(ErrorKind::UnsupportedShape, "trigger must be a boolean condition");
  auto shape = match_response(body);
  if (!shape)
    throw Error(ErrorKind::UnsupportedShape,
                "body outside the convertible fragment: " + render_temporal(body));
  SvaAst ast;
  ast.clock = clock;
  Sequence ante;
  ante.terms.push_back(SeqTerm{{0, 0}, boolean_to_expr(trigger), 1});
  ast.antecedent = std::move(ante);
  ast.consequent.terms.push_back(SeqTerm{shape->window, shape->signal, shape->repeat});
  return ast;
}

// ---------------------------------------------------------------------------

std::vector<AssertionEntry> parse_assertion_file(std::string_view text) {
  std::vector<AssertionEntry> out;
  for (const auto& raw : util::split_lines(text)) {
    auto line = util::trim(raw);
    if (line.empty() || line.substr(0, 2) == "//") continue;
    AssertionEntry e;
    e.text = std::string(line);
    try {
      e.ast = parse_sva(line);
    } catch (const Error& err) {
      e.parse_error = err.what();
    }
    e.id = (e.ast && !e.ast->label.empty()) ? e.ast->label : fmt::format("a{}", out.size());
    out.push_back(std::move(e));
  }
  return out;
}

std::string write_assertion_file(const std::vector<AssertionEntry>& entries,
                                 std::string_view header_comment) {
  std::string out;
  for (const auto& line : util::split_lines(header_comment)) out += "// " + line + "\n";
  for (const auto& e : entries) out += e.text + "\n";
  return out;
}

}  // namespace specsva
