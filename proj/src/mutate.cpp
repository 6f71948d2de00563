// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/mutate.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "specsva/error.hpp"
#include "specsva/util.hpp"

namespace specsva {

using nlohmann::json;

std::string to_string(MutationKind k) {
  switch (k) {
    case MutationKind::BinaryOpReplace: return "BinaryOpReplace";
    case MutationKind::CondNegate: return "CondNegate";
    case MutationKind::ConstReplace: return "ConstReplace";
    case MutationKind::SignalSwap: return "SignalSwap";
    case MutationKind::ResetBranchDelete: return "ResetBranchDelete";
  }
  return "?";
}

MutationKind parse_mutation_kind(std::string_view text) {
  for (auto k : {MutationKind::BinaryOpReplace, MutationKind::CondNegate, MutationKind::ConstReplace,
                 MutationKind::SignalSwap, MutationKind::ResetBranchDelete})
    if (to_string(k) == text) return k;
  throw Error(ErrorKind::SyntaxError, fmt::format("unknown mutation operator '{}'", text));
}

namespace {

std::vector<Op> replacements(Op op) {
  switch (op) {
    case Op::Add: return {Op::Sub};
    case Op::Sub: return {Op::Add};
    case Op::BitAnd: return {Op::BitOr, Op::BitXor};
    case Op::BitOr: return {Op::BitAnd, Op::BitXor};
    case Op::BitXor: return {Op::BitAnd, Op::BitOr};
    case Op::Eq: return {Op::Ne};
    case Op::Ne: return {Op::Eq};
    case Op::Lt: return {Op::Gt, Op::Le};
    case Op::Gt: return {Op::Lt, Op::Ge};
    case Op::Le: return {Op::Lt, Op::Ge};
    case Op::Ge: return {Op::Gt, Op::Le};
    case Op::LogAnd: return {Op::LogOr};
    case Op::LogOr: return {Op::LogAnd};
    default: return {};
  }
}

struct ExprEdit {
  int node = 0;
  MutationOperator op;
  Expr result;  // the whole expression after the edit
};

/// Replaces the node with preorder index `target`.
bool replace_at(Expr& e, int& counter, int target, const Expr& replacement) {
  if (counter++ == target) {
    e = replacement;
    return true;
  }
  for (auto& a : e.args)
    if (replace_at(a, counter, target, replacement)) return true;
  return false;
}

Expr with_node(const Expr& root, int target, const Expr& replacement) {
  Expr out = root;
  int counter = 0;
  replace_at(out, counter, target, replacement);
  return out;
}

class Enumerator {
 public:
  explicit Enumerator(const RtlModule& m) : m_(m) {
    clock_ = m.clock();
    for (const auto& p : m.processes)
      if (!p.async_reset.empty()) resets_.insert(p.async_reset);
    for (const auto& s : m.signals) {
      auto low = util::lower(s.name);
      if (s.kind == SignalKind::Input && s.width == 1 &&
          (low.find("rst") != std::string::npos || low.find("reset") != std::string::npos))
        resets_.insert(s.name);
    }
  }

  std::vector<Mutant> run() {
    for (std::size_t i = 0; i < m_.assigns.size(); ++i) {
      auto loc = fmt::format("assign{}", i);
      for (auto& edit : expr_edits(m_.assigns[i].rhs)) {
        RtlModule mm = m_;
        mm.assigns[i].rhs = edit.result;
        emit(std::move(mm), edit.op, fmt::format("{}#e{}", loc, edit.node), {m_.assigns[i].lhs});
      }
    }
    for (std::size_t p = 0; p < m_.processes.size(); ++p) {
      walk_body(p, {}, m_.processes[p].body, fmt::format("proc{}", p));
    }
    return std::move(out_);
  }

 private:
  // Path to a statement list: sequence of (stmt index, branch) where branch
  // 0 = then, 1 = else.
  using Path = std::vector<std::pair<std::size_t, int>>;

  std::vector<Stmt>& body_at(RtlModule& mm, std::size_t proc, const Path& path) {
    std::vector<Stmt>* body = &mm.processes[proc].body;
    for (auto [idx, branch] : path) body = branch == 0 ? &(*body)[idx].then_body : &(*body)[idx].else_body;
    return *body;
  }

  void walk_body(std::size_t proc, const Path& path, const std::vector<Stmt>& body, const std::string& loc) {
    int ifs = 0;
    int nbas = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
      const Stmt& s = body[i];
      if (s.kind == Stmt::Kind::Nba) {
        auto here = fmt::format("{}/nba{}", loc, nbas++);
        for (auto& edit : expr_edits(s.rhs)) {
          RtlModule mm = m_;
          body_at(mm, proc, path)[i].rhs = edit.result;
          emit(std::move(mm), edit.op, fmt::format("{}#e{}", here, edit.node), {s.lhs});
        }
        continue;
      }
      auto here = fmt::format("{}/if{}", loc, ifs++);
      std::vector<std::string> targets;
      collect_targets(s, targets);

      {
        RtlModule mm = m_;
        Expr negated = Expr::unary(Op::LogNot, s.cond);
        body_at(mm, proc, path)[i].cond = negated;
        emit(std::move(mm), {MutationKind::CondNegate, render_expr(s.cond), render_expr(negated)}, here, targets);
      }
      if (mentions_reset(s.cond)) {
        RtlModule mm = m_;
        auto& list = body_at(mm, proc, path);
        std::vector<Stmt> replacement = s.has_else ? s.else_body : std::vector<Stmt>{};
        list.erase(list.begin() + static_cast<std::ptrdiff_t>(i));
        list.insert(list.begin() + static_cast<std::ptrdiff_t>(i), replacement.begin(), replacement.end());
        emit(std::move(mm),
             {MutationKind::ResetBranchDelete, fmt::format("if ({})", render_expr(s.cond)),
              s.has_else ? "else branch only" : "(deleted)"},
             here, targets);
      }
      for (auto& edit : expr_edits(s.cond)) {
        RtlModule mm = m_;
        body_at(mm, proc, path)[i].cond = edit.result;
        emit(std::move(mm), edit.op, fmt::format("{}#e{}", here, edit.node), targets);
      }
      Path then_path = path;
      then_path.emplace_back(i, 0);
      walk_body(proc, then_path, s.then_body, here);
      if (s.has_else) {
        Path else_path = path;
        else_path.emplace_back(i, 1);
        walk_body(proc, else_path, s.else_body, here + "/else");
      }
    }
  }

  static void collect_targets(const Stmt& s, std::vector<std::string>& out) {
    if (s.kind == Stmt::Kind::Nba) {
      if (std::find(out.begin(), out.end(), s.lhs) == out.end()) out.push_back(s.lhs);
      return;
    }
    for (const auto& c : s.then_body) collect_targets(c, out);
    for (const auto& c : s.else_body) collect_targets(c, out);
  }

  bool mentions_reset(const Expr& e) const {
    std::vector<std::string> ids;
    collect_identifiers(e, ids);
    return std::any_of(ids.begin(), ids.end(), [&](const std::string& id) { return resets_.count(id) > 0; });
  }

  std::vector<ExprEdit> expr_edits(const Expr& root) const {
    std::vector<ExprEdit> out;
    int counter = 0;
    std::function<void(const Expr&)> visit = [&](const Expr& e) {
      int k = counter++;
      auto add = [&](MutationKind kind, const Expr& replacement) {
        out.push_back({k, {kind, render_expr(e), render_expr(replacement)}, with_node(root, k, replacement)});
      };
      switch (e.kind) {
        case ExprKind::Binary:
          for (Op r : replacements(e.op)) add(MutationKind::BinaryOpReplace, Expr::binary(r, e.args[0], e.args[1]));
          break;
        case ExprKind::Ternary:
          add(MutationKind::CondNegate, Expr::ternary(Expr::unary(Op::LogNot, e.args[0]), e.args[1], e.args[2]));
          break;
        case ExprKind::Const: {
          int w = e.width == 0 ? 32 : e.width;
          auto mask = width_mask(w);
          std::vector<std::uint64_t> values;
          if (w == 1) {
            values.push_back(e.value ^ 1u);
          } else {
            for (auto v : {e.value + 1, e.value - 1, std::uint64_t{0}}) {
              v &= mask;
              if (v != e.value && std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
            }
          }
          for (auto v : values) add(MutationKind::ConstReplace, Expr::constant(v, e.width, e.base));
          break;
        }
        case ExprKind::Ident: {
          const auto* self = m_.find(e.name);
          if (!self || e.name == clock_) break;
          for (const auto& s : m_.signals)
            if (s.name != e.name && s.name != clock_ && s.width == self->width)
              add(MutationKind::SignalSwap, Expr::ident(s.name));
          break;
        }
        default: break;
      }
      for (const auto& a : e.args) visit(a);
    };
    visit(root);
    return out;
  }

  void emit(RtlModule mm, MutationOperator op, std::string location, std::vector<std::string> affected) {
    try {
      validate_rtl(mm);
    } catch (const Error&) {
      return;
    }
    auto key = render_rtl(folded(mm));
    if (key == original_key() || !seen_.insert(key).second) return;
    Mutant mu;
    mu.op = std::move(op);
    mu.location = std::move(location);
    mu.affected = std::move(affected);
    mu.module = std::move(mm);
    out_.push_back(std::move(mu));
  }

  static void fold_body(std::vector<Stmt>& body) {
    for (auto& s : body) {
      if (s.kind == Stmt::Kind::Nba) {
        s.rhs = fold_constants(s.rhs);
      } else {
        s.cond = fold_constants(s.cond);
        fold_body(s.then_body);
        fold_body(s.else_body);
      }
    }
  }

  static RtlModule folded(RtlModule mm) {
    for (auto& a : mm.assigns) a.rhs = fold_constants(a.rhs);
    for (auto& p : mm.processes) fold_body(p.body);
    return mm;
  }

  const std::string& original_key() {
    if (original_key_.empty()) original_key_ = render_rtl(folded(m_));
    return original_key_;
  }

  const RtlModule& m_;
  std::string clock_;
  std::set<std::string> resets_;
  std::set<std::string> seen_;
  std::string original_key_;
  std::vector<Mutant> out_;
};

}  // namespace

std::vector<Mutant> enumerate_mutants(const RtlModule& rtl) {
  validate_rtl(rtl);
  auto all = Enumerator(rtl).run();
  std::string original = render_rtl(rtl);
  for (auto& m : all) m.diff = line_diff(original, render_rtl(m.module));
  return all;
}

std::vector<Mutant> generate_mutants(const RtlModule& rtl, std::size_t budget, std::uint64_t seed) {
  if (budget < 1) throw Error(ErrorKind::NoMutationSites, "mutation budget must be at least 1");
  auto all = enumerate_mutants(rtl);
  if (all.empty()) throw Error(ErrorKind::NoMutationSites, fmt::format("no mutation sites in '{}'", rtl.name));
  std::vector<Mutant> chosen;
  if (all.size() <= budget) {
    chosen = std::move(all);
  } else {
    // Selection sampling: each subset of size `budget` is equally likely and
    // the enumeration order is preserved.
    std::mt19937_64 rng(seed);
    std::size_t needed = budget;
    for (std::size_t i = 0; i < all.size() && needed > 0; ++i) {
      std::size_t remaining = all.size() - i;
      if (rng() % remaining < needed) {
        chosen.push_back(std::move(all[i]));
        --needed;
      }
    }
  }
  for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i].id = fmt::format("m{:03}", i);
  return chosen;
}

std::string line_diff(const std::string& before, const std::string& after) {
  auto a = util::split_lines(before);
  auto b = util::split_lines(after);
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix])
    ++suffix;
  std::size_t a_len = a.size() - prefix - suffix;
  std::size_t b_len = b.size() - prefix - suffix;
  if (a_len == 0 && b_len == 0) return {};
  std::string out = fmt::format("@@ -{},{} +{},{} @@\n", prefix + 1, a_len, prefix + 1, b_len);
  for (std::size_t i = 0; i < a_len; ++i) out += "-" + a[prefix + i] + "\n";
  for (std::size_t i = 0; i < b_len; ++i) out += "+" + b[prefix + i] + "\n";
  return out;
}

void write_mutants(const std::filesystem::path& dir, const RtlModule& rtl, const std::vector<Mutant>& mutants,
                   std::size_t budget, std::uint64_t seed) {
  json list = json::array();
  for (const auto& m : mutants) {
    auto file = m.id + ".v";
    util::write_file(dir / file, render_rtl(m.module));
    list.push_back({{"id", m.id},
                    {"operator", to_string(m.op.kind)},
                    {"from", m.op.from},
                    {"to", m.op.to},
                    {"location", m.location},
                    {"affected", m.affected},
                    {"file", file},
                    {"diff", m.diff}});
  }
  json manifest = {{"schema", "specsva/mutants"},
                   {"version", 1},
                   {"design", rtl.name},
                   {"catalog", "in-repo operator catalog (stand-in for a bug-derived mutation tool)"},
                   {"operators", {"BinaryOpReplace", "CondNegate", "ConstReplace", "SignalSwap", "ResetBranchDelete"}},
                   {"budget", budget},
                   {"seed", seed},
                   {"mutants", list}};
  util::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<Mutant> load_mutants(const std::filesystem::path& dir) {
  json manifest;
  try {
    manifest = json::parse(util::read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SyntaxError, fmt::format("bad mutant manifest: {}", e.what()));
  }
  std::vector<Mutant> out;
  for (const auto& j : manifest.at("mutants")) {
    Mutant m;
    m.id = j.at("id").get<std::string>();
    m.op.kind = parse_mutation_kind(j.at("operator").get<std::string>());
    m.op.from = j.value("from", "");
    m.op.to = j.value("to", "");
    m.location = j.at("location").get<std::string>();
    m.affected = j.value("affected", std::vector<std::string>{});
    m.diff = j.value("diff", "");
    m.module = parse_rtl(util::read_file(dir / j.at("file").get<std::string>()));
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace specsva
