// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/util.hpp"

namespace specsva {

namespace {

struct Punct {
  std::string_view text;
  Tok kind;
};

// Longest first.
constexpr Punct kPuncts[] = {
    {"|->", Tok::OverlapImpl}, {"|=>", Tok::NonOverlapImpl},
    {"##", Tok::HashHash}, {"&&", Tok::AmpAmp}, {"||", Tok::PipePipe},
    {"==", Tok::EqEq}, {"!=", Tok::BangEq}, {"<=", Tok::LtEq}, {">=", Tok::GtEq},
    {"=>", Tok::Implies},
    {"(", Tok::LParen}, {")", Tok::RParen}, {"[", Tok::LBracket}, {"]", Tok::RBracket},
    {"{", Tok::LBrace}, {"}", Tok::RBrace}, {",", Tok::Comma}, {";", Tok::Semi},
    {":", Tok::Colon}, {"@", Tok::At}, {"?", Tok::Question}, {".", Tok::Dot},
    {"#", Tok::Hash}, {"+", Tok::Plus}, {"-", Tok::Minus}, {"*", Tok::Star},
    {"/", Tok::Slash}, {"&", Tok::Amp}, {"|", Tok::Pipe}, {"^", Tok::Caret},
    {"~", Tok::Tilde}, {"!", Tok::Bang}, {"<", Tok::Lt}, {">", Tok::Gt},
    {"=", Tok::Assign},
};

int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::uint64_t parse_digits(std::string_view digits, int radix, std::size_t pos) {
  std::uint64_t v = 0;
  bool any = false;
  for (char c : digits) {
    if (c == '_') continue;
    int d = digit_value(c);
    if (d < 0 || d >= radix)
      throw Error(ErrorKind::SyntaxError, fmt::format("bad digit '{}' in number at {}", c, pos), pos);
    v = v * static_cast<std::uint64_t>(radix) + static_cast<std::uint64_t>(d);
    any = true;
  }
  if (!any) throw Error(ErrorKind::SyntaxError, fmt::format("empty number at {}", pos), pos);
  return v;
}

int precedence(Op op) {
  switch (op) {
    case Op::LogOr: return 2;
    case Op::LogAnd: return 3;
    case Op::BitOr: return 4;
    case Op::BitXor: return 5;
    case Op::BitAnd: return 6;
    case Op::Eq: case Op::Ne: return 7;
    case Op::Lt: case Op::Gt: case Op::Le: case Op::Ge: return 8;
    case Op::Add: case Op::Sub: return 9;
    default: return 10;
  }
}

constexpr int kTernaryPrecedence = 1;

int expr_precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Binary: return precedence(e.op);
    case ExprKind::Ternary: return kTernaryPrecedence;
    case ExprKind::Unary: return 10;
    default: return 11;
  }
}

std::string render_const(const Expr& e) {
  if (e.width == 0) return std::to_string(e.value);
  switch (e.base) {
    case 'b': {
      std::string bits;
      for (int i = e.width - 1; i >= 0; --i) bits += ((e.value >> i) & 1u) ? '1' : '0';
      return fmt::format("{}'b{}", e.width, bits);
    }
    case 'h': return fmt::format("{}'h{:x}", e.width, e.value);
    case 'o': return fmt::format("{}'o{:o}", e.width, e.value);
    default: return fmt::format("{}'d{}", e.width, e.value);
  }
}

std::optional<Op> binary_op_for(Tok t) {
  switch (t) {
    case Tok::PipePipe: return Op::LogOr;
    case Tok::AmpAmp: return Op::LogAnd;
    case Tok::Pipe: return Op::BitOr;
    case Tok::Caret: return Op::BitXor;
    case Tok::Amp: return Op::BitAnd;
    case Tok::EqEq: return Op::Eq;
    case Tok::BangEq: return Op::Ne;
    case Tok::Lt: return Op::Lt;
    case Tok::Gt: return Op::Gt;
    case Tok::LtEq: return Op::Le;
    case Tok::GtEq: return Op::Ge;
    case Tok::Plus: return Op::Add;
    case Tok::Minus: return Op::Sub;
    default: return std::nullopt;
  }
}

class ExprParser {
 public:
  ExprParser(TokenCursor& c, const ExprParseOptions& o) : cur_(c), opts_(o) {}

  Expr parse() { return ternary(); }

 private:
  Expr ternary() {
    Expr cond = binary(2);
    if (cur_.accept(Tok::Question)) {
      Expr a = ternary();
      cur_.expect(Tok::Colon, "':' in conditional expression");
      Expr b = ternary();
      return Expr::ternary(std::move(cond), std::move(a), std::move(b));
    }
    return cond;
  }

  Expr binary(int min_prec) {
    Expr lhs = unary();
    for (;;) {
      auto op = binary_op_for(cur_.peek().kind);
      if (!op || precedence(*op) < min_prec) return lhs;
      cur_.advance();
      Expr rhs = binary(precedence(*op) + 1);
      lhs = Expr::binary(*op, std::move(lhs), std::move(rhs));
    }
  }

  Expr unary() {
    switch (cur_.peek().kind) {
      case Tok::Bang: cur_.advance(); return Expr::unary(Op::LogNot, unary());
      case Tok::Tilde: cur_.advance(); return Expr::unary(Op::BitNot, unary());
      case Tok::Minus: cur_.advance(); return Expr::unary(Op::Neg, unary());
      case Tok::Amp: cur_.advance(); return Expr::unary(Op::RedAnd, unary());
      case Tok::Pipe: cur_.advance(); return Expr::unary(Op::RedOr, unary());
      case Tok::Caret: cur_.advance(); return Expr::unary(Op::RedXor, unary());
      case Tok::Plus: cur_.advance(); return unary();
      default: return postfix(primary());
    }
  }

  Expr postfix(Expr base) {
    while (cur_.at(Tok::LBracket) && !cur_.at(Tok::Star, 1)) {
      if (base.kind != ExprKind::Ident) cur_.fail("identifier before bit-select");
      cur_.advance();
      const Token& idx = cur_.expect(Tok::Number, "constant bit index");
      cur_.expect(Tok::RBracket, "']'");
      Expr e;
      e.kind = ExprKind::Index;
      e.value = idx.value;
      e.args.push_back(std::move(base));
      base = std::move(e);
    }
    return base;
  }

  Expr primary() {
    const Token& t = cur_.peek();
    switch (t.kind) {
      case Tok::Ident: {
        std::string name = cur_.advance().text;
        return Expr::ident(std::move(name));
      }
      case Tok::Number: {
        const Token& n = cur_.advance();
        return Expr::constant(n.value, n.width, n.base);
      }
      case Tok::LParen: {
        cur_.advance();
        Expr inner = ternary();
        cur_.expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::SysIdent: {
        if (!opts_.allow_system_calls) cur_.fail("expression (system functions not allowed here)");
        Expr call;
        call.kind = ExprKind::Call;
        call.name = cur_.advance().text;
        static const std::vector<std::string> known = {"$past", "$rose", "$fell", "$stable"};
        if (std::find(known.begin(), known.end(), call.name) == known.end())
          throw Error(ErrorKind::UnsupportedConstruct, "system function " + call.name, t.pos);
        cur_.expect(Tok::LParen, "'(' after system function");
        call.args.push_back(ternary());
        if (cur_.accept(Tok::Comma)) {
          if (call.name != "$past") cur_.fail("')'");
          const Token& depth = cur_.expect(Tok::Number, "constant $past depth");
          call.args.push_back(Expr::constant(depth.value));
        }
        cur_.expect(Tok::RParen, "')'");
        return call;
      }
      default: cur_.fail("expression");
    }
  }

  TokenCursor& cur_;
  const ExprParseOptions& opts_;
};

}  // namespace

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::SysIdent: return "system function";
    case Tok::Number: return "number";
    case Tok::End: return "end of input";
    default: break;
  }
  for (const auto& p : kPuncts)
    if (p.kind == kind) return p.text;
  return "token";
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      auto end = text.find("*/", i + 2);
      if (end == std::string_view::npos)
        throw Error(ErrorKind::SyntaxError, fmt::format("unterminated comment at {}", i), i);
      i = end + 2;
      continue;
    }
    Token tok;
    tok.pos = i;
    if (util::is_ident_start(c) || (c == '$' && i + 1 < n && util::is_ident_start(text[i + 1]))) {
      std::size_t j = i + 1;
      while (j < n && util::is_ident_char(text[j])) ++j;
      tok.kind = c == '$' ? Tok::SysIdent : Tok::Ident;
      tok.text = std::string(text.substr(i, j - i));
      i = j;
      out.push_back(std::move(tok));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '\'' && i + 1 < n)) {
      std::size_t j = i;
      while (j < n && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      std::string_view size_part = text.substr(i, j - i);
      if (j < n && text[j] == '\'') {
        std::size_t k = j + 1;
        if (k < n && (text[k] == 's' || text[k] == 'S')) ++k;
        if (k >= n) throw Error(ErrorKind::SyntaxError, fmt::format("bad literal at {}", i), i);
        char base = static_cast<char>(std::tolower(static_cast<unsigned char>(text[k])));
        int radix = base == 'b' ? 2 : base == 'o' ? 8 : base == 'd' ? 10 : base == 'h' ? 16 : 0;
        if (radix == 0) throw Error(ErrorKind::SyntaxError, fmt::format("bad radix at {}", i), i);
        std::size_t d = k + 1;
        while (d < n && (std::isxdigit(static_cast<unsigned char>(text[d])) || text[d] == '_')) ++d;
        tok.value = parse_digits(text.substr(k + 1, d - k - 1), radix, i);
        tok.width = size_part.empty() ? 32 : static_cast<int>(parse_digits(size_part, 10, i));
        if (tok.width < 1 || tok.width > 64)
          throw Error(ErrorKind::UnsupportedConstruct,
                      fmt::format("literal width {} at {} (1..64 supported)", tok.width, i), i);
        tok.value &= width_mask(tok.width);
        tok.base = base;
        j = d;
      } else {
        tok.value = parse_digits(size_part, 10, i);
      }
      tok.kind = Tok::Number;
      tok.text = std::string(text.substr(i, j - i));
      i = j;
      out.push_back(std::move(tok));
      continue;
    }
    bool matched = false;
    for (const auto& p : kPuncts) {
      if (text.substr(i, p.text.size()) == p.text) {
        tok.kind = p.kind;
        tok.text = std::string(p.text);
        i += p.text.size();
        matched = true;
        break;
      }
    }
    if (!matched)
      throw Error(ErrorKind::SyntaxError, fmt::format("unexpected character '{}' at {}", c, i), i);
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = Tok::End;
  end.pos = n;
  out.push_back(end);
  return out;
}

std::string_view op_text(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::BitAnd: return "&";
    case Op::BitOr: return "|";
    case Op::BitXor: return "^";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Gt: return ">";
    case Op::Le: return "<=";
    case Op::Ge: return ">=";
    case Op::LogAnd: return "&&";
    case Op::LogOr: return "||";
    case Op::LogNot: return "!";
    case Op::BitNot: return "~";
    case Op::Neg: return "-";
    case Op::RedAnd: return "&";
    case Op::RedOr: return "|";
    case Op::RedXor: return "^";
  }
  return "?";
}

bool is_binary(Op op) {
  switch (op) {
    case Op::LogNot: case Op::BitNot: case Op::Neg:
    case Op::RedAnd: case Op::RedOr: case Op::RedXor: return false;
    default: return true;
  }
}

Expr Expr::ident(std::string name) {
  Expr e;
  e.kind = ExprKind::Ident;
  e.name = std::move(name);
  return e;
}

Expr Expr::constant(std::uint64_t value, int width, char base) {
  Expr e;
  e.kind = ExprKind::Const;
  e.value = width > 0 ? value & width_mask(width) : value;
  e.width = width;
  e.base = base;
  return e;
}

Expr Expr::unary(Op op, Expr operand) {
  Expr e;
  e.kind = ExprKind::Unary;
  e.op = op;
  e.args.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr Expr::ternary(Expr cond, Expr then_e, Expr else_e) {
  Expr e;
  e.kind = ExprKind::Ternary;
  e.args.push_back(std::move(cond));
  e.args.push_back(std::move(then_e));
  e.args.push_back(std::move(else_e));
  return e;
}

std::string render_operand(const Expr& e) {
  if (e.kind == ExprKind::Binary || e.kind == ExprKind::Ternary) return "(" + render_expr(e) + ")";
  return render_expr(e);
}

std::string render_expr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Ident: return e.name;
    case ExprKind::Const: return render_const(e);
    case ExprKind::Index: return fmt::format("{}[{}]", render_expr(e.args[0]), e.value);
    case ExprKind::Call: {
      std::vector<std::string> parts;
      for (const auto& a : e.args) parts.push_back(render_expr(a));
      return fmt::format("{}({})", e.name, util::join(parts, ", "));
    }
    case ExprKind::Unary: {
      const Expr& a = e.args[0];
      std::string inner = render_operand(a);
      // Keep "- -x" and "& &x" from gluing into other tokens.
      if (a.kind == ExprKind::Unary) inner = "(" + inner + ")";
      return std::string(op_text(e.op)) + inner;
    }
    case ExprKind::Binary: {
      int p = precedence(e.op);
      const Expr& l = e.args[0];
      const Expr& r = e.args[1];
      std::string ls = expr_precedence(l) < p ? "(" + render_expr(l) + ")" : render_expr(l);
      std::string rs = expr_precedence(r) <= p ? "(" + render_expr(r) + ")" : render_expr(r);
      return fmt::format("{} {} {}", ls, op_text(e.op), rs);
    }
    case ExprKind::Ternary: {
      auto part = [](const Expr& x) {
        return expr_precedence(x) <= kTernaryPrecedence ? "(" + render_expr(x) + ")" : render_expr(x);
      };
      return fmt::format("{} ? {} : {}", part(e.args[0]), part(e.args[1]), part(e.args[2]));
    }
  }
  return {};
}

std::uint64_t apply_unary(Op op, std::uint64_t v, int width) {
  auto mask = width_mask(width);
  switch (op) {
    case Op::LogNot: return v == 0 ? 1 : 0;
    case Op::BitNot: return ~v & mask;
    case Op::Neg: return (~v + 1) & mask;
    case Op::RedAnd: return (v & mask) == mask ? 1 : 0;
    case Op::RedOr: return (v & mask) != 0 ? 1 : 0;
    case Op::RedXor: return static_cast<std::uint64_t>(std::popcount(v & mask) & 1);
    default: return v;
  }
}

std::uint64_t apply_binary(Op op, std::uint64_t a, std::uint64_t b, int width) {
  auto mask = width_mask(width);
  switch (op) {
    case Op::Add: return (a + b) & mask;
    case Op::Sub: return (a - b) & mask;
    case Op::BitAnd: return (a & b) & mask;
    case Op::BitOr: return (a | b) & mask;
    case Op::BitXor: return (a ^ b) & mask;
    case Op::Eq: return a == b ? 1 : 0;
    case Op::Ne: return a != b ? 1 : 0;
    case Op::Lt: return a < b ? 1 : 0;
    case Op::Gt: return a > b ? 1 : 0;
    case Op::Le: return a <= b ? 1 : 0;
    case Op::Ge: return a >= b ? 1 : 0;
    case Op::LogAnd: return (a != 0 && b != 0) ? 1 : 0;
    case Op::LogOr: return (a != 0 || b != 0) ? 1 : 0;
    default: return 0;
  }
}

namespace {

int const_width(const Expr& e) { return e.width == 0 ? 32 : e.width; }

int result_width(Op op, int wa, int wb) {
  switch (op) {
    case Op::Add: case Op::Sub: case Op::BitAnd: case Op::BitOr: case Op::BitXor:
      return std::max(wa, wb);
    default: return 1;
  }
}

int unary_result_width(Op op, int wa) {
  return (op == Op::BitNot || op == Op::Neg) ? wa : 1;
}

}  // namespace

Expr fold_constants(const Expr& e) {
  Expr out = e;
  for (auto& a : out.args) a = fold_constants(a);
  auto all_const = std::all_of(out.args.begin(), out.args.end(),
                               [](const Expr& a) { return a.kind == ExprKind::Const; });
  if (out.args.empty() || !all_const) return out;
  switch (out.kind) {
    case ExprKind::Unary: {
      int w = unary_result_width(out.op, const_width(out.args[0]));
      return Expr::constant(apply_unary(out.op, out.args[0].value, const_width(out.args[0])), w);
    }
    case ExprKind::Binary: {
      int w = result_width(out.op, const_width(out.args[0]), const_width(out.args[1]));
      return Expr::constant(apply_binary(out.op, out.args[0].value, out.args[1].value, w), w);
    }
    case ExprKind::Ternary: return out.args[0].value != 0 ? out.args[1] : out.args[2];
    case ExprKind::Index: return Expr::constant((out.args[0].value >> out.value) & 1u, 1);
    default: return out;
  }
}

void collect_identifiers(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == ExprKind::Ident) {
    if (std::find(out.begin(), out.end(), e.name) == out.end()) out.push_back(e.name);
    return;
  }
  for (const auto& a : e.args) collect_identifiers(a, out);
}

const Token& TokenCursor::peek(std::size_t ahead) const {
  std::size_t i = std::min(index_ + ahead, tokens_.size() - 1);
  return tokens_[i];
}

bool TokenCursor::at_ident(std::string_view text) const {
  return peek().kind == Tok::Ident && peek().text == text;
}

const Token& TokenCursor::advance() {
  const Token& t = tokens_[index_];
  if (index_ + 1 < tokens_.size()) ++index_;
  return t;
}

bool TokenCursor::accept(Tok kind) {
  if (!at(kind)) return false;
  advance();
  return true;
}

const Token& TokenCursor::expect(Tok kind, std::string_view context) {
  if (!at(kind)) fail(context);
  return advance();
}

void TokenCursor::expect_ident(std::string_view word) {
  if (!at_ident(word)) fail(fmt::format("'{}'", word));
  advance();
}

void TokenCursor::fail(std::string_view expected) const {
  const Token& t = peek();
  std::string found = t.kind == Tok::End ? "end of input" : fmt::format("'{}'", t.text);
  throw Error(ErrorKind::SyntaxError,
              fmt::format("at offset {}: expected {}, found {}", t.pos, expected, found), t.pos);
}

Expr parse_expression(TokenCursor& cursor, const ExprParseOptions& opts) {
  ExprParser p(cursor, opts);
  return p.parse();
}

Expr parse_expression_text(std::string_view text, const ExprParseOptions& opts) {
  TokenCursor cursor(tokenize(text));
  Expr e = parse_expression(cursor, opts);
  if (!cursor.at(Tok::End)) cursor.fail("end of expression");
  return e;
}

CompiledExpr CompiledExpr::compile(const Expr& e, const Resolver& resolve) {
  CompiledExpr c;
  c.root_ = c.add(e, resolve);
  return c;
}

int CompiledExpr::add(const Expr& e, const Resolver& resolve) {
  Node n{};
  switch (e.kind) {
    case ExprKind::Ident: {
      auto b = resolve(e.name);
      if (!b) throw Error(ErrorKind::UnknownSignal, "unknown signal '" + e.name + "'");
      if (b->slot >= 0) {
        n.kind = NodeKind::Slot;
        n.slot = b->slot;
      } else {
        n.kind = NodeKind::Const;
        n.value = b->constant & width_mask(b->width);
      }
      n.width = b->width;
      break;
    }
    case ExprKind::Const:
      n.kind = NodeKind::Const;
      n.width = const_width(e);
      n.value = e.value & width_mask(n.width);
      break;
    case ExprKind::Unary:
      n.kind = NodeKind::Unary;
      n.op = e.op;
      n.a = add(e.args[0], resolve);
      n.width = unary_result_width(e.op, nodes_[n.a].width);
      break;
    case ExprKind::Binary:
      n.kind = NodeKind::Binary;
      n.op = e.op;
      n.a = add(e.args[0], resolve);
      n.b = add(e.args[1], resolve);
      n.width = result_width(e.op, nodes_[n.a].width, nodes_[n.b].width);
      break;
    case ExprKind::Ternary:
      n.kind = NodeKind::Ternary;
      n.a = add(e.args[0], resolve);
      n.b = add(e.args[1], resolve);
      n.c = add(e.args[2], resolve);
      n.width = std::max(nodes_[n.b].width, nodes_[n.c].width);
      break;
    case ExprKind::Index:
      n.kind = NodeKind::Index;
      n.a = add(e.args[0], resolve);
      n.value = e.value;
      n.width = 1;
      if (static_cast<int>(e.value) >= nodes_[n.a].width)
        throw Error(ErrorKind::InvalidDesign,
                    fmt::format("bit index {} out of range for {}", e.value, render_expr(e.args[0])));
      break;
    case ExprKind::Call: {
      n.a = add(e.args[0], resolve);
      int look_back = 1;
      if (e.name == "$past") {
        n.kind = NodeKind::Past;
        n.value = e.args.size() > 1 ? e.args[1].value : 1;
        look_back = static_cast<int>(n.value);
        n.width = nodes_[n.a].width;
      } else {
        n.kind = e.name == "$rose" ? NodeKind::Rose : e.name == "$fell" ? NodeKind::Fell : NodeKind::Stable;
        n.width = 1;
      }
      history_ = std::max(history_, look_back);
      break;
    }
  }
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size() - 1);
}

}  // namespace specsva
