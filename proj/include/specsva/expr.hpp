// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Verilog-style expressions shared by the assertion and RTL front ends:
// tokens, AST, recursive-descent parser, printer and a compiled evaluator.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specsva {

enum class Tok {
  Ident,
  SysIdent,  // $stable, $past, ...
  Number,
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  Comma, Semi, Colon, At, Question, Dot, Hash, HashHash,
  Plus, Minus, Star, Slash,
  Amp, Pipe, Caret, Tilde, Bang,
  AmpAmp, PipePipe,
  EqEq, BangEq, Lt, Gt, LtEq, GtEq,
  Assign,          // =
  Implies,         // =>
  OverlapImpl,     // |->
  NonOverlapImpl,  // |=>
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t pos = 0;
  // Number payload.
  std::uint64_t value = 0;
  int width = 0;  // 0 = unsized
  char base = 'd';
};

std::string_view describe(Tok kind);

/// Tokenizes Verilog/SVA text; skips `//` and `/* */` comments.
/// Throws SyntaxError on a stray character.
std::vector<Token> tokenize(std::string_view text);

enum class ExprKind { Ident, Const, Unary, Binary, Ternary, Index, Call };

enum class Op {
  Add, Sub, BitAnd, BitOr, BitXor,
  Eq, Ne, Lt, Gt, Le, Ge,
  LogAnd, LogOr,
  LogNot, BitNot, Neg, RedAnd, RedOr, RedXor,
};

std::string_view op_text(Op op);
bool is_binary(Op op);

struct Expr {
  ExprKind kind = ExprKind::Const;
  std::string name;          // Ident / Call
  std::uint64_t value = 0;   // Const value, or Index position
  int width = 0;             // Const width, 0 when unsized
  char base = 'd';           // Const radix for printing
  Op op = Op::Add;
  std::vector<Expr> args;

  static Expr ident(std::string name);
  static Expr constant(std::uint64_t value, int width = 0, char base = 'd');
  static Expr unary(Op op, Expr operand);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  static Expr ternary(Expr cond, Expr then_e, Expr else_e);

  friend bool operator==(const Expr&, const Expr&) = default;
};

/// Canonical text with minimal parentheses.
std::string render_expr(const Expr& e);
/// Wraps in parentheses unless the expression is a primary.
std::string render_operand(const Expr& e);

/// Folds constant subtrees.
Expr fold_constants(const Expr& e);

void collect_identifiers(const Expr& e, std::vector<std::string>& out);

/// Cursor over a token vector. Front ends subclass or compose it.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  bool at(Tok kind, std::size_t ahead = 0) const { return peek(ahead).kind == kind; }
  bool at_ident(std::string_view text) const;
  const Token& advance();
  bool accept(Tok kind);
  const Token& expect(Tok kind, std::string_view context);
  void expect_ident(std::string_view word);
  [[noreturn]] void fail(std::string_view expected) const;
  std::size_t position() const { return index_; }
  void reset(std::size_t index) { index_ = index; }

 private:
  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

struct ExprParseOptions {
  bool allow_system_calls = false;
  /// Stop before `[` followed by `*` (consecutive repetition).
  bool stop_at_repetition = true;
};

/// Full Verilog precedence including `?:`.
Expr parse_expression(TokenCursor& cursor, const ExprParseOptions& opts = {});
Expr parse_expression_text(std::string_view text, const ExprParseOptions& opts = {});

inline std::uint64_t width_mask(int width) {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

/// Identifier binding for compilation: either a storage slot or a constant.
struct Binding {
  int slot = -1;
  std::uint64_t constant = 0;
  int width = 1;
};

using Resolver = std::function<std::optional<Binding>(const std::string&)>;

/// Flattened expression tree with resolved slots and precomputed widths.
/// `read(slot, offset)` returns the slot value `offset` cycles from now
/// (offset ≤ 0; only system calls produce negative offsets).
class CompiledExpr {
 public:
  CompiledExpr() = default;
  /// Throws UnknownSignal for an identifier the resolver cannot bind.
  static CompiledExpr compile(const Expr& e, const Resolver& resolve);

  template <class Read>
  std::uint64_t eval(Read&& read, int offset = 0) const {
    return eval_node(root_, read, offset);
  }
  int width() const { return nodes_.empty() ? 1 : nodes_[root_].width; }
  /// Largest look-back (in cycles) required by $past/$rose/... calls.
  int history() const { return history_; }

 private:
  enum class NodeKind : std::uint8_t { Slot, Const, Unary, Binary, Ternary, Index, Past, Rose, Fell, Stable };
  struct Node {
    NodeKind kind;
    Op op = Op::Add;
    int a = -1, b = -1, c = -1;
    int slot = -1;
    int width = 1;
    std::uint64_t value = 0;  // Const value, Index bit, Past depth
  };

  int add(const Expr& e, const Resolver& resolve);

  template <class Read>
  std::uint64_t eval_node(int idx, Read& read, int offset) const;

  std::vector<Node> nodes_;
  int root_ = 0;
  int history_ = 0;
};

std::uint64_t apply_unary(Op op, std::uint64_t v, int width);
std::uint64_t apply_binary(Op op, std::uint64_t a, std::uint64_t b, int width);

template <class Read>
std::uint64_t CompiledExpr::eval_node(int idx, Read& read, int offset) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.kind) {
    case NodeKind::Slot: return read(n.slot, offset) & width_mask(n.width);
    case NodeKind::Const: return n.value;
    case NodeKind::Unary: return apply_unary(n.op, eval_node(n.a, read, offset), nodes_[n.a].width);
    case NodeKind::Binary:
      if (n.op == Op::LogAnd) return (eval_node(n.a, read, offset) != 0 && eval_node(n.b, read, offset) != 0) ? 1 : 0;
      if (n.op == Op::LogOr) return (eval_node(n.a, read, offset) != 0 || eval_node(n.b, read, offset) != 0) ? 1 : 0;
      return apply_binary(n.op, eval_node(n.a, read, offset), eval_node(n.b, read, offset), n.width);
    case NodeKind::Ternary:
      return (eval_node(n.a, read, offset) != 0 ? eval_node(n.b, read, offset) : eval_node(n.c, read, offset)) &
             width_mask(n.width);
    case NodeKind::Index: return (eval_node(n.a, read, offset) >> n.value) & 1u;
    case NodeKind::Past: return eval_node(n.a, read, offset - static_cast<int>(n.value));
    case NodeKind::Rose: {
      auto now = eval_node(n.a, read, offset) & 1u;
      auto before = eval_node(n.a, read, offset - 1) & 1u;
      return (now == 1 && before == 0) ? 1 : 0;
    }
    case NodeKind::Fell: {
      auto now = eval_node(n.a, read, offset) & 1u;
      auto before = eval_node(n.a, read, offset - 1) & 1u;
      return (now == 0 && before == 1) ? 1 : 0;
    }
    case NodeKind::Stable:
      return eval_node(n.a, read, offset) == eval_node(n.a, read, offset - 1) ? 1 : 0;
  }
  return 0;
}

}  // namespace specsva
