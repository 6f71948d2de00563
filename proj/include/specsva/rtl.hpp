// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Synthesizable Verilog subset: one module, one clock, continuous assigns
// and clocked processes built from if/else and non-blocking assignments.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specsva/expr.hpp"
#include "specsva/sva.hpp"
#include "specsva/trace.hpp"

namespace specsva {

enum class SignalKind { Input, Output, Internal };

struct SignalDecl {
  std::string name;
  int width = 1;
  SignalKind kind = SignalKind::Internal;
  bool is_reg = false;
  std::optional<std::uint64_t> init;
  friend bool operator==(const SignalDecl&, const SignalDecl&) = default;
};

struct ParamDecl {
  std::string name;
  std::uint64_t value = 0;
  int width = 32;
  bool local = true;
  friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

struct Stmt {
  enum class Kind { If, Nba };
  Kind kind = Kind::Nba;
  Expr cond;                       // If
  std::vector<Stmt> then_body;     // If
  std::vector<Stmt> else_body;     // If
  bool has_else = false;           // If
  std::string lhs;                 // Nba
  Expr rhs;                        // Nba
  friend bool operator==(const Stmt&, const Stmt&) = default;
};

struct Process {
  std::string clock;
  std::string async_reset;  // empty when the sensitivity list has only the clock
  bool reset_negedge = false;
  std::vector<Stmt> body;
  friend bool operator==(const Process&, const Process&) = default;
};

struct ContAssign {
  std::string lhs;
  Expr rhs;
  friend bool operator==(const ContAssign&, const ContAssign&) = default;
};

struct RtlModule {
  std::string name;
  std::vector<std::string> port_order;
  std::vector<SignalDecl> signals;  // declaration order
  std::vector<ParamDecl> params;
  std::vector<ContAssign> assigns;
  std::vector<Process> processes;

  const SignalDecl* find(std::string_view name) const;
  const ParamDecl* find_param(std::string_view name) const;
  /// Clock of the first process, or empty for purely combinational modules.
  std::string clock() const;
  /// Input ports other than the clock, in declaration order.
  std::vector<const SignalDecl*> stimulus_inputs() const;
  /// Localparams/parameters as assertion-visible constants.
  ConstantTable constants() const;

  friend bool operator==(const RtlModule&, const RtlModule&) = default;
};

/// Throws SyntaxError, UnsupportedConstruct (naming the construct) or
/// InvalidDesign (undeclared targets, multiple drivers, combinational loops,
/// several clocks).
RtlModule parse_rtl(std::string_view text);
/// Structural checks shared by the parser and the mutation engine.
void validate_rtl(const RtlModule& m);
/// Canonical source text; parse_rtl(render_rtl(m)) == m.
std::string render_rtl(const RtlModule& m);

/// Input values per cycle, columns in `stimulus_inputs()` order.
struct Stimulus {
  std::vector<std::string> inputs;
  std::vector<std::vector<std::uint64_t>> rows;  // rows[cycle][input]
  std::size_t length() const { return rows.size(); }
};

std::string write_stimulus(const Stimulus& s);

/// Compiled cycle simulator. Per cycle: drive inputs, settle combinational
/// assigns, sample every signal, then fire the clock edge (all non-blocking
/// right-hand sides read pre-edge values and commit together).
class Simulator {
 public:
  explicit Simulator(const RtlModule& m);

  /// Trace column order: every declared signal except the clock.
  const std::vector<std::string>& trace_names() const { return trace_names_; }
  const std::vector<int>& trace_widths() const { return trace_widths_; }
  std::size_t input_count() const { return input_slots_.size(); }
  const std::vector<int>& input_widths() const { return input_widths_; }
  const std::vector<std::string>& input_names() const { return input_names_; }

  using State = std::vector<std::uint64_t>;
  State initial_state() const;

  /// Drives `inputs` on top of `state`, settles, writes row `cycle` of
  /// `trace`, and returns the post-edge state.
  State step(const State& state, const std::vector<std::uint64_t>& inputs, Trace& trace,
             std::size_t cycle) const;

  Trace run(const Stimulus& stimulus) const;
  Trace make_trace(std::size_t length) const;

 private:
  struct CStmt {
    bool is_if = false;
    CompiledExpr expr;  // condition or right-hand side
    int target = -1;
    int target_width = 1;
    std::vector<CStmt> then_body;
    std::vector<CStmt> else_body;
  };

  void exec(const std::vector<CStmt>& body, const std::vector<std::uint64_t>& cur,
            std::vector<std::uint64_t>& next) const;
  std::vector<CStmt> compile_body(const std::vector<Stmt>& body, const Resolver& resolve);

  std::vector<std::string> trace_names_;
  std::vector<int> trace_widths_;
  std::vector<int> trace_slots_;
  std::vector<int> input_slots_;
  std::vector<int> input_widths_;
  std::vector<std::string> input_names_;
  std::vector<int> slot_widths_;
  std::vector<std::uint64_t> init_;
  std::vector<std::pair<int, CompiledExpr>> assigns_;  // topologically ordered
  std::vector<std::vector<CStmt>> processes_;
};

/// Convenience wrapper over Simulator::run.
Trace simulate(const RtlModule& m, const Stimulus& stimulus);

}  // namespace specsva
