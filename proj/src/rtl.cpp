// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/rtl.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/util.hpp"

namespace specsva {

const SignalDecl* RtlModule::find(std::string_view n) const {
  for (const auto& s : signals)
    if (s.name == n) return &s;
  return nullptr;
}

const ParamDecl* RtlModule::find_param(std::string_view n) const {
  for (const auto& p : params)
    if (p.name == n) return &p;
  return nullptr;
}

std::string RtlModule::clock() const { return processes.empty() ? std::string() : processes.front().clock; }

std::vector<const SignalDecl*> RtlModule::stimulus_inputs() const {
  std::vector<const SignalDecl*> out;
  auto clk = clock();
  for (const auto& s : signals)
    if (s.kind == SignalKind::Input && s.name != clk) out.push_back(&s);
  return out;
}

ConstantTable RtlModule::constants() const {
  ConstantTable out;
  for (const auto& p : params) out.emplace_back(p.name, Binding{-1, p.value, p.width});
  return out;
}

namespace {

const std::set<std::string, std::less<>> kUnsupportedWords = {
    "initial", "case", "casez", "casex", "function", "task", "generate", "for", "while",
    "integer", "genvar", "inout", "fork", "always_comb", "always_ff", "always_latch", "real",
    "repeat", "forever", "specify", "defparam"};

class RtlParser {
 public:
  explicit RtlParser(std::string_view text) : cur_(tokenize(text)) {}

  RtlModule parse() {
    reject_unsupported();
    cur_.expect_ident("module");
    m_.name = cur_.expect(Tok::Ident, "module name").text;
    if (cur_.accept(Tok::Hash)) parameter_header();
    if (cur_.accept(Tok::LParen)) {
      if (!cur_.at(Tok::RParen)) port_list();
      cur_.expect(Tok::RParen, "')' closing port list");
    }
    cur_.expect(Tok::Semi, "';' after module header");
    while (!cur_.at_ident("endmodule")) {
      if (cur_.at(Tok::End)) cur_.fail("'endmodule'");
      item();
    }
    cur_.advance();
    if (!cur_.at(Tok::End)) cur_.fail("end of file after 'endmodule'");
    for (const auto& p : m_.port_order)
      if (!m_.find(p))
        throw Error(ErrorKind::InvalidDesign, fmt::format("port '{}' has no direction declaration", p));
    validate_rtl(m_);
    return std::move(m_);
  }

 private:
  void reject_unsupported() const {
    const Token& t = cur_.peek();
    if (t.kind == Tok::Ident && kUnsupportedWords.count(t.text))
      throw Error(ErrorKind::UnsupportedConstruct, fmt::format("'{}' at offset {}", t.text, t.pos),
                  t.pos, t.text);
  }

  std::uint64_t const_eval(const Expr& e) {
    Resolver resolve = [&](const std::string& name) -> std::optional<Binding> {
      if (const auto* p = m_.find_param(name)) return Binding{-1, p->value, p->width};
      return std::nullopt;
    };
    try {
      auto compiled = CompiledExpr::compile(e, resolve);
      return compiled.eval([](int, int) -> std::uint64_t { return 0; });
    } catch (const Error&) {
      throw Error(ErrorKind::SyntaxError, "expected a constant expression, got " + render_expr(e));
    }
  }

  int const_width(const Expr& e) {
    if (e.kind == ExprKind::Const) return e.width == 0 ? 32 : e.width;
    if (e.kind == ExprKind::Ident)
      if (const auto* p = m_.find_param(e.name)) return p->width;
    return 32;
  }

  std::optional<int> range() {
    if (!cur_.accept(Tok::LBracket)) return std::nullopt;
    std::size_t pos = cur_.peek().pos;
    auto msb = const_eval(parse_expression(cur_));
    cur_.expect(Tok::Colon, "':' in range");
    auto lsb = const_eval(parse_expression(cur_));
    cur_.expect(Tok::RBracket, "']'");
    if (lsb != 0)
      throw Error(ErrorKind::UnsupportedConstruct, fmt::format("range with nonzero lsb at offset {}", pos),
                  pos, "range");
    if (msb >= 64)
      throw Error(ErrorKind::UnsupportedConstruct, fmt::format("vector wider than 64 bits at offset {}", pos),
                  pos, "wide vector");
    return static_cast<int>(msb) + 1;
  }

  void declare(const std::string& name, int width, SignalKind kind, bool is_reg,
               std::optional<std::uint64_t> init, std::size_t pos) {
    if (m_.find_param(name))
      throw Error(ErrorKind::InvalidDesign, fmt::format("'{}' redeclared at offset {}", name, pos), pos);
    for (auto& s : m_.signals) {
      if (s.name != name) continue;
      // Non-ANSI style: `output [3:0] q;` followed by `reg [3:0] q;`.
      bool mergeable = s.kind != SignalKind::Internal && kind == SignalKind::Internal && is_reg &&
                       !s.is_reg && s.width == width;
      if (!mergeable)
        throw Error(ErrorKind::InvalidDesign, fmt::format("'{}' redeclared at offset {}", name, pos), pos);
      s.is_reg = true;
      if (init) s.init = *init & width_mask(width);
      return;
    }
    if (kind != SignalKind::Internal && !ansi_ &&
        std::find(m_.port_order.begin(), m_.port_order.end(), name) == m_.port_order.end())
      throw Error(ErrorKind::InvalidDesign,
                  fmt::format("'{}' declared as a port but missing from the port list", name), pos);
    if (kind == SignalKind::Internal && !ansi_ &&
        std::find(m_.port_order.begin(), m_.port_order.end(), name) != m_.port_order.end())
      throw Error(ErrorKind::InvalidDesign,
                  fmt::format("port '{}' needs an input/output declaration", name), pos);
    SignalDecl d;
    d.name = name;
    d.width = width;
    d.kind = kind;
    d.is_reg = is_reg;
    if (init) d.init = *init & width_mask(width);
    m_.signals.push_back(std::move(d));
  }

  void parameter_header() {
    cur_.expect(Tok::LParen, "'(' after '#'");
    bool first = true;
    while (!cur_.at(Tok::RParen)) {
      if (!first) cur_.expect(Tok::Comma, "','");
      first = false;
      cur_.accept_ident_keyword("parameter");
      param_assignment(false, range());
    }
    cur_.advance();
  }

  void param_assignment(bool local, std::optional<int> width) {
    std::size_t pos = cur_.peek().pos;
    std::string name = cur_.expect(Tok::Ident, "parameter name").text;
    cur_.expect(Tok::Assign, "'=' in parameter declaration");
    Expr value = parse_expression(cur_);
    if (m_.find(name) || m_.find_param(name))
      throw Error(ErrorKind::InvalidDesign, fmt::format("'{}' redeclared at offset {}", name, pos), pos);
    ParamDecl p;
    p.name = name;
    p.local = local;
    p.width = width.value_or(const_width(value));
    p.value = const_eval(value) & width_mask(p.width);
    m_.params.push_back(std::move(p));
  }

  std::optional<SignalKind> direction() {
    if (cur_.at_ident("input")) return SignalKind::Input;
    if (cur_.at_ident("output")) return SignalKind::Output;
    return std::nullopt;
  }

  void port_list() {
    if (!direction()) {
      reject_unsupported();
      do {
        m_.port_order.push_back(cur_.expect(Tok::Ident, "port name").text);
      } while (cur_.accept(Tok::Comma));
      return;
    }
    ansi_ = true;
    SignalKind kind = SignalKind::Input;
    bool is_reg = false;
    int width = 1;
    do {
      reject_unsupported();
      if (auto d = direction()) {
        cur_.advance();
        kind = *d;
        is_reg = false;
        if (cur_.at_ident("wire")) {
          cur_.advance();
        } else if (cur_.at_ident("reg")) {
          cur_.advance();
          is_reg = true;
        }
        width = range().value_or(1);
      }
      std::size_t pos = cur_.peek().pos;
      std::string name = cur_.expect(Tok::Ident, "port name").text;
      std::optional<std::uint64_t> init;
      if (cur_.accept(Tok::Assign)) init = const_eval(parse_expression(cur_));
      if (kind == SignalKind::Input && is_reg)
        throw Error(ErrorKind::InvalidDesign, fmt::format("input '{}' declared reg", name), pos);
      m_.port_order.push_back(name);
      declare(name, width, kind, is_reg, init, pos);
    } while (cur_.accept(Tok::Comma));
  }

  void item() {
    reject_unsupported();
    const Token& t = cur_.peek();
    if (t.kind != Tok::Ident) cur_.fail("module item");
    if (t.text == "input" || t.text == "output") {
      if (ansi_)
        throw Error(ErrorKind::SyntaxError,
                    fmt::format("at offset {}: port declaration in an ANSI-style module body", t.pos), t.pos);
      SignalKind kind = *direction();
      cur_.advance();
      bool is_reg = false;
      if (cur_.at_ident("wire")) {
        cur_.advance();
      } else if (cur_.at_ident("reg")) {
        cur_.advance();
        is_reg = true;
      }
      int width = range().value_or(1);
      do {
        std::size_t pos = cur_.peek().pos;
        std::string name = cur_.expect(Tok::Ident, "port name").text;
        if (kind == SignalKind::Input && is_reg)
          throw Error(ErrorKind::InvalidDesign, fmt::format("input '{}' declared reg", name), pos);
        declare(name, width, kind, is_reg, std::nullopt, pos);
      } while (cur_.accept(Tok::Comma));
      cur_.expect(Tok::Semi, "';'");
      return;
    }
    if (t.text == "reg" || t.text == "wire") {
      bool is_reg = t.text == "reg";
      cur_.advance();
      int width = range().value_or(1);
      do {
        std::size_t pos = cur_.peek().pos;
        std::string name = cur_.expect(Tok::Ident, "net name").text;
        if (cur_.at(Tok::LBracket))
          throw Error(ErrorKind::UnsupportedConstruct, fmt::format("memory array '{}'", name), pos, "memory");
        if (cur_.accept(Tok::Assign)) {
          Expr value = parse_expression(cur_);
          if (is_reg) {
            declare(name, width, SignalKind::Internal, true, const_eval(value), pos);
          } else {
            declare(name, width, SignalKind::Internal, false, std::nullopt, pos);
            m_.assigns.push_back({name, std::move(value)});
          }
        } else {
          declare(name, width, SignalKind::Internal, is_reg, std::nullopt, pos);
        }
      } while (cur_.accept(Tok::Comma));
      cur_.expect(Tok::Semi, "';'");
      return;
    }
    if (t.text == "localparam" || t.text == "parameter") {
      bool local = t.text == "localparam";
      cur_.advance();
      auto width = range();
      do {
        param_assignment(local, width);
      } while (cur_.accept(Tok::Comma));
      cur_.expect(Tok::Semi, "';'");
      return;
    }
    if (t.text == "assign") {
      cur_.advance();
      std::string lhs = cur_.expect(Tok::Ident, "assignment target").text;
      if (cur_.at(Tok::LBracket))
        throw Error(ErrorKind::UnsupportedConstruct, "bit-select assignment target", cur_.peek().pos,
                    "bit-select assignment");
      cur_.expect(Tok::Assign, "'='");
      Expr rhs = parse_expression(cur_);
      cur_.expect(Tok::Semi, "';'");
      m_.assigns.push_back({std::move(lhs), std::move(rhs)});
      return;
    }
    if (t.text == "always") {
      cur_.advance();
      always_block();
      return;
    }
    if (cur_.at(Tok::Ident, 1) || cur_.at(Tok::Hash, 1))
      throw Error(ErrorKind::UnsupportedConstruct, fmt::format("module instantiation at offset {}", t.pos),
                  t.pos, "module instantiation");
    cur_.fail("module item");
  }

  void always_block() {
    Process p;
    cur_.expect(Tok::At, "'@' after 'always'");
    cur_.expect(Tok::LParen, "'(' in sensitivity list");
    if (cur_.at(Tok::Star))
      throw Error(ErrorKind::UnsupportedConstruct, "combinational always block", cur_.peek().pos,
                  "always @(*)");
    std::vector<std::pair<std::string, bool>> edges;
    do {
      bool neg = false;
      if (cur_.at_ident("posedge")) {
        cur_.advance();
      } else if (cur_.at_ident("negedge")) {
        cur_.advance();
        neg = true;
      } else {
        throw Error(ErrorKind::UnsupportedConstruct, "level-sensitive always block", cur_.peek().pos,
                    "level-sensitive always");
      }
      edges.emplace_back(cur_.expect(Tok::Ident, "signal in sensitivity list").text, neg);
    } while (cur_.accept(Tok::Comma) || cur_.accept_ident_keyword("or"));
    cur_.expect(Tok::RParen, "')' closing sensitivity list");
    if (edges.size() > 2)
      throw Error(ErrorKind::UnsupportedConstruct, "more than one asynchronous reset", 0, "sensitivity list");
    if (edges[0].second)
      throw Error(ErrorKind::UnsupportedConstruct, "negedge clock", 0, "negedge clock");
    p.clock = edges[0].first;
    if (edges.size() == 2) {
      p.async_reset = edges[1].first;
      p.reset_negedge = edges[1].second;
    }
    p.body = statement();
    m_.processes.push_back(std::move(p));
  }

  std::vector<Stmt> statement() {
    reject_unsupported();
    if (cur_.at_ident("begin")) {
      cur_.advance();
      if (cur_.accept(Tok::Colon)) cur_.expect(Tok::Ident, "block label");
      std::vector<Stmt> out;
      while (!cur_.at_ident("end")) {
        if (cur_.at(Tok::End)) cur_.fail("'end'");
        for (auto& s : statement()) out.push_back(std::move(s));
      }
      cur_.advance();
      return out;
    }
    if (cur_.at_ident("if")) {
      cur_.advance();
      Stmt s;
      s.kind = Stmt::Kind::If;
      cur_.expect(Tok::LParen, "'(' after 'if'");
      s.cond = parse_expression(cur_);
      cur_.expect(Tok::RParen, "')' closing if condition");
      s.then_body = statement();
      if (cur_.at_ident("else")) {
        cur_.advance();
        s.has_else = true;
        s.else_body = statement();
      }
      return {std::move(s)};
    }
    const Token& t = cur_.expect(Tok::Ident, "statement");
    Stmt s;
    s.kind = Stmt::Kind::Nba;
    s.lhs = t.text;
    if (cur_.at(Tok::LBracket))
      throw Error(ErrorKind::UnsupportedConstruct, "bit-select assignment target", cur_.peek().pos,
                  "bit-select assignment");
    if (cur_.at(Tok::Assign))
      throw Error(ErrorKind::UnsupportedConstruct,
                  fmt::format("blocking assignment to '{}' in clocked process", s.lhs), cur_.peek().pos,
                  "blocking assignment");
    cur_.expect(Tok::LtEq, "'<=' in non-blocking assignment");
    s.rhs = parse_expression(cur_);
    cur_.expect(Tok::Semi, "';'");
    return {std::move(s)};
  }

  struct Cursor : TokenCursor {
    using TokenCursor::TokenCursor;
    bool accept_ident_keyword(std::string_view word) {
      if (!at_ident(word)) return false;
      advance();
      return true;
    }
  };

  Cursor cur_;
  RtlModule m_;
  bool ansi_ = false;
};

void collect_nba_targets(const std::vector<Stmt>& body, std::vector<std::string>& out) {
  for (const auto& s : body) {
    if (s.kind == Stmt::Kind::Nba) {
      if (std::find(out.begin(), out.end(), s.lhs) == out.end()) out.push_back(s.lhs);
    } else {
      collect_nba_targets(s.then_body, out);
      collect_nba_targets(s.else_body, out);
    }
  }
}

void for_each_expr(const std::vector<Stmt>& body, const std::function<void(const Expr&)>& fn) {
  for (const auto& s : body) {
    if (s.kind == Stmt::Kind::Nba) {
      fn(s.rhs);
    } else {
      fn(s.cond);
      for_each_expr(s.then_body, fn);
      for_each_expr(s.else_body, fn);
    }
  }
}

Resolver module_resolver(const RtlModule& m) {
  return [&m](const std::string& name) -> std::optional<Binding> {
    for (std::size_t i = 0; i < m.signals.size(); ++i)
      if (m.signals[i].name == name) return Binding{static_cast<int>(i), 0, m.signals[i].width};
    if (const auto* p = m.find_param(name)) return Binding{-1, p->value, p->width};
    return std::nullopt;
  };
}

/// Indices into m.assigns in evaluation order. Throws InvalidDesign on a loop.
std::vector<std::size_t> assign_order(const RtlModule& m) {
  std::map<std::string, std::size_t> driver;
  for (std::size_t i = 0; i < m.assigns.size(); ++i) driver[m.assigns[i].lhs] = i;
  std::vector<int> state(m.assigns.size(), 0);  // 0 new, 1 visiting, 2 done
  std::vector<std::size_t> order;
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    if (state[i] == 2) return;
    if (state[i] == 1)
      throw Error(ErrorKind::InvalidDesign, fmt::format("combinational loop through '{}'", m.assigns[i].lhs));
    state[i] = 1;
    std::vector<std::string> deps;
    collect_identifiers(m.assigns[i].rhs, deps);
    for (const auto& d : deps) {
      auto it = driver.find(d);
      if (it != driver.end()) visit(it->second);
    }
    state[i] = 2;
    order.push_back(i);
  };
  for (std::size_t i = 0; i < m.assigns.size(); ++i) visit(i);
  return order;
}

}  // namespace

void validate_rtl(const RtlModule& m) {
  std::set<std::string> names;
  for (const auto& s : m.signals) {
    if (!names.insert(s.name).second)
      throw Error(ErrorKind::InvalidDesign, fmt::format("'{}' declared twice", s.name));
    if (s.width < 1 || s.width > 64)
      throw Error(ErrorKind::InvalidDesign, fmt::format("'{}' has unsupported width {}", s.name, s.width));
  }
  for (const auto& p : m.params)
    if (!names.insert(p.name).second)
      throw Error(ErrorKind::InvalidDesign, fmt::format("'{}' declared twice", p.name));

  auto resolve = module_resolver(m);
  auto check_expr = [&](const Expr& e) {
    try {
      (void)CompiledExpr::compile(e, resolve);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::UnknownSignal)
        throw Error(ErrorKind::InvalidDesign, "undeclared identifier in " + render_expr(e));
      throw;
    }
  };

  std::map<std::string, std::string> driven_by;
  auto claim = [&](const std::string& target, const std::string& source) {
    const auto* s = m.find(target);
    if (!s) throw Error(ErrorKind::InvalidDesign, fmt::format("assignment to undeclared '{}'", target));
    if (s->kind == SignalKind::Input)
      throw Error(ErrorKind::InvalidDesign, fmt::format("assignment to input '{}'", target));
    auto [it, fresh] = driven_by.emplace(target, source);
    if (!fresh)
      throw Error(ErrorKind::InvalidDesign,
                  fmt::format("'{}' driven by both {} and {}", target, it->second, source));
  };

  for (std::size_t i = 0; i < m.assigns.size(); ++i) {
    const auto& a = m.assigns[i];
    claim(a.lhs, fmt::format("assign{}", i));
    if (m.find(a.lhs)->is_reg)
      throw Error(ErrorKind::InvalidDesign, fmt::format("continuous assignment to reg '{}'", a.lhs));
    check_expr(a.rhs);
  }

  std::string clock;
  for (std::size_t i = 0; i < m.processes.size(); ++i) {
    const auto& p = m.processes[i];
    if (clock.empty()) clock = p.clock;
    if (p.clock != clock)
      throw Error(ErrorKind::InvalidDesign, fmt::format("second clock '{}' (only '{}' is supported)", p.clock, clock));
    for (const auto* edge : {&p.clock, &p.async_reset}) {
      if (edge->empty()) continue;
      const auto* s = m.find(*edge);
      if (!s || s->kind != SignalKind::Input || s->width != 1)
        throw Error(ErrorKind::InvalidDesign, fmt::format("'{}' must be a 1-bit input", *edge));
    }
    std::vector<std::string> targets;
    collect_nba_targets(p.body, targets);
    for (const auto& t : targets) {
      claim(t, fmt::format("proc{}", i));
      if (!m.find(t)->is_reg)
        throw Error(ErrorKind::InvalidDesign, fmt::format("non-blocking assignment to wire '{}'", t));
      if (t == clock) throw Error(ErrorKind::InvalidDesign, "clock assigned in process");
    }
    for_each_expr(p.body, check_expr);
  }
  if (!clock.empty()) {
    for (const auto& a : m.assigns) {
      std::vector<std::string> ids;
      collect_identifiers(a.rhs, ids);
      if (std::find(ids.begin(), ids.end(), clock) != ids.end())
        throw Error(ErrorKind::InvalidDesign, "clock used as data in assign to '" + a.lhs + "'");
    }
  }
  (void)assign_order(m);
}

RtlModule parse_rtl(std::string_view text) { return RtlParser(text).parse(); }

namespace {

std::string range_text(int width) { return width == 1 ? "" : fmt::format("[{}:0] ", width - 1); }

void render_body(const std::vector<Stmt>& body, int indent, std::string& out);

void render_stmt(const Stmt& s, int indent, std::string& out, bool continuation = false) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (s.kind == Stmt::Kind::Nba) {
    out += fmt::format("{}{} <= {};\n", pad, s.lhs, render_expr(s.rhs));
    return;
  }
  out += fmt::format("{}if ({}) begin\n", continuation ? "" : pad, render_expr(s.cond));
  render_body(s.then_body, indent + 1, out);
  out += pad + "end";
  if (!s.has_else) {
    out += "\n";
  } else if (s.else_body.size() == 1 && s.else_body[0].kind == Stmt::Kind::If) {
    out += " else ";
    render_stmt(s.else_body[0], indent, out, true);
  } else {
    out += " else begin\n";
    render_body(s.else_body, indent + 1, out);
    out += pad + "end\n";
  }
}

void render_body(const std::vector<Stmt>& body, int indent, std::string& out) {
  for (const auto& s : body) render_stmt(s, indent, out);
}

}  // namespace

std::string render_rtl(const RtlModule& m) {
  std::string out = fmt::format("module {} (\n", m.name);
  for (std::size_t i = 0; i < m.port_order.size(); ++i) {
    const auto* s = m.find(m.port_order[i]);
    out += fmt::format("  {} {}{}{}{}{}\n", s->kind == SignalKind::Input ? "input" : "output",
                       s->is_reg ? "reg " : "", range_text(s->width), s->name,
                       s->init ? fmt::format(" = {}", *s->init) : "",
                       i + 1 < m.port_order.size() ? "," : "");
  }
  out += ");\n";
  for (const auto& p : m.params)
    out += fmt::format("  {} {}{} = {};\n", p.local ? "localparam" : "parameter",
                       p.width == 32 ? "" : range_text(p.width).empty() ? "[0:0] " : range_text(p.width),
                       p.name, p.value);
  for (const auto& s : m.signals) {
    if (s.kind != SignalKind::Internal) continue;
    out += fmt::format("  {} {}{}{};\n", s.is_reg ? "reg" : "wire", range_text(s.width), s.name,
                       s.init ? fmt::format(" = {}", *s.init) : "");
  }
  for (const auto& a : m.assigns) out += fmt::format("  assign {} = {};\n", a.lhs, render_expr(a.rhs));
  for (const auto& p : m.processes) {
    out += fmt::format("  always @(posedge {}", p.clock);
    if (!p.async_reset.empty())
      out += fmt::format(" or {} {}", p.reset_negedge ? "negedge" : "posedge", p.async_reset);
    out += ") begin\n";
    render_body(p.body, 2, out);
    out += "  end\n";
  }
  out += "endmodule\n";
  return out;
}

std::string write_stimulus(const Stimulus& s) {
  std::string out = "inputs";
  for (const auto& n : s.inputs) out += " " + n;
  out += "\n";
  for (const auto& row : s.rows) {
    std::vector<std::string> cells;
    for (auto v : row) cells.push_back(std::to_string(v));
    out += util::join(cells, " ") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

Simulator::Simulator(const RtlModule& m) {
  validate_rtl(m);
  auto resolve = module_resolver(m);
  std::string clk = m.clock();
  for (std::size_t i = 0; i < m.signals.size(); ++i) {
    const auto& s = m.signals[i];
    slot_widths_.push_back(s.width);
    init_.push_back(s.init.value_or(0));
    if (s.name == clk) continue;
    trace_names_.push_back(s.name);
    trace_widths_.push_back(s.width);
    trace_slots_.push_back(static_cast<int>(i));
    if (s.kind == SignalKind::Input) {
      input_slots_.push_back(static_cast<int>(i));
      input_widths_.push_back(s.width);
      input_names_.push_back(s.name);
    }
  }
  for (auto i : assign_order(m)) {
    const auto& a = m.assigns[i];
    assigns_.emplace_back(resolve(a.lhs)->slot, CompiledExpr::compile(a.rhs, resolve));
  }
  for (const auto& p : m.processes) processes_.push_back(compile_body(p.body, resolve));
}

std::vector<Simulator::CStmt> Simulator::compile_body(const std::vector<Stmt>& body,
                                                      const Resolver& resolve) {
  std::vector<CStmt> out;
  for (const auto& s : body) {
    CStmt c;
    if (s.kind == Stmt::Kind::If) {
      c.is_if = true;
      c.expr = CompiledExpr::compile(s.cond, resolve);
      c.then_body = compile_body(s.then_body, resolve);
      c.else_body = compile_body(s.else_body, resolve);
    } else {
      auto b = *resolve(s.lhs);
      c.target = b.slot;
      c.target_width = b.width;
      c.expr = CompiledExpr::compile(s.rhs, resolve);
    }
    out.push_back(std::move(c));
  }
  return out;
}

void Simulator::exec(const std::vector<CStmt>& body, const std::vector<std::uint64_t>& cur,
                     std::vector<std::uint64_t>& next) const {
  auto read = [&cur](int slot, int) { return cur[static_cast<std::size_t>(slot)]; };
  for (const auto& s : body) {
    if (s.is_if) {
      exec(s.expr.eval(read) != 0 ? s.then_body : s.else_body, cur, next);
    } else {
      next[static_cast<std::size_t>(s.target)] = s.expr.eval(read) & width_mask(s.target_width);
    }
  }
}

Simulator::State Simulator::initial_state() const { return init_; }

Trace Simulator::make_trace(std::size_t length) const { return Trace(trace_names_, trace_widths_, length); }

Simulator::State Simulator::step(const State& state, const std::vector<std::uint64_t>& inputs, Trace& trace,
                                 std::size_t cycle) const {
  State cur = state;
  for (std::size_t i = 0; i < input_slots_.size(); ++i) {
    auto slot = static_cast<std::size_t>(input_slots_[i]);
    cur[slot] = inputs[i] & width_mask(slot_widths_[slot]);
  }
  auto read = [&cur](int slot, int) { return cur[static_cast<std::size_t>(slot)]; };
  for (const auto& [slot, expr] : assigns_) {
    auto s = static_cast<std::size_t>(slot);
    cur[s] = expr.eval(read) & width_mask(slot_widths_[s]);
  }
  for (std::size_t i = 0; i < trace_slots_.size(); ++i)
    trace.set(static_cast<int>(i), cycle, cur[static_cast<std::size_t>(trace_slots_[i])]);
  State next = cur;
  for (const auto& body : processes_) exec(body, cur, next);
  return next;
}

Trace Simulator::run(const Stimulus& stimulus) const {
  std::vector<std::size_t> column(input_slots_.size());
  for (std::size_t i = 0; i < input_slots_.size(); ++i) {
    const auto& name = input_names_[i];
    auto it = std::find(stimulus.inputs.begin(), stimulus.inputs.end(), name);
    if (it == stimulus.inputs.end())
      throw Error(ErrorKind::InvalidDesign, fmt::format("stimulus does not drive input '{}'", name));
    column[i] = static_cast<std::size_t>(it - stimulus.inputs.begin());
  }
  Trace trace = make_trace(stimulus.length());
  State state = initial_state();
  std::vector<std::uint64_t> inputs(input_slots_.size());
  for (std::size_t t = 0; t < stimulus.length(); ++t) {
    for (std::size_t i = 0; i < column.size(); ++i) inputs[i] = stimulus.rows[t].at(column[i]);
    state = step(state, inputs, trace, t);
  }
  return trace;
}

Trace simulate(const RtlModule& m, const Stimulus& stimulus) { return Simulator(m).run(stimulus); }

}  // namespace specsva
