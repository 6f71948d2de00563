// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Bounded checking of assertions against RTL by exhaustive or seeded random
// stimulus enumeration.
//
// A start cycle t is checked only when its whole obligation window
// [t, t + total_span] lies inside the trace, so a trace never fails merely
// because it ends. Every reported failure is also a failure under the
// pessimistic eval_sva semantics.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specsva/mutate.hpp"
#include "specsva/rtl.hpp"
#include "specsva/sva.hpp"

namespace specsva {

enum class CheckMode { Exhaustive, Random };

struct CheckConfig {
  CheckMode mode = CheckMode::Exhaustive;
  std::size_t trace_length = 8;
  std::size_t max_stimuli = 256;  // random mode
  std::uint64_t seed = 1;         // random mode
  std::size_t exhaustive_cap = 20;  // input bits x trace_length
  unsigned threads = 0;             // 0: hardware concurrency
  /// Optional reset input: driven active for the first `reset_cycles`
  /// cycles and inactive afterwards instead of being enumerated.
  std::string reset;
  bool reset_active_low = false;
  std::size_t reset_cycles = 1;
};

/// Throws ConfigError.
void validate(const CheckConfig& cfg);

struct Witness {
  Stimulus stimulus;
  Trace trace;
  std::size_t fail_cycle = 0;
};

struct DetectResult {
  bool detected = false;
  std::optional<Witness> witness;
};

/// 1 iff some enumerated stimulus drives the design into a failing trace.
/// Throws UnknownSignal, BudgetExceeded.
DetectResult detect(const SvaAst& assertion, const RtlModule& rtl, const CheckConfig& cfg);

struct GoldenResult {
  enum class Kind { Holds, Fails, Vacuous };
  Kind kind = Kind::Holds;
  std::optional<Witness> counterexample;
};

std::string to_string(GoldenResult::Kind k);

GoldenResult check_golden(const SvaAst& assertion, const RtlModule& rtl, const CheckConfig& cfg);

enum class Provenance { Simulated, External, Skipped };

std::string to_string(Provenance p);

struct DetectionMatrix {
  std::vector<std::string> assertions;
  std::vector<std::string> mutants;
  std::vector<std::uint8_t> cells;  // row-major, assertions x mutants
  std::vector<Provenance> provenance;

  DetectionMatrix() = default;
  DetectionMatrix(std::vector<std::string> assertion_ids, std::vector<std::string> mutant_ids);

  std::size_t n() const { return assertions.size(); }
  std::size_t k() const { return mutants.size(); }
  bool at(std::size_t i, std::size_t j) const { return cells[i * k() + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v, Provenance p = Provenance::Simulated);
  Provenance provenance_at(std::size_t i, std::size_t j) const { return provenance[i * k() + j]; }
  /// Rows kept in the given order.
  DetectionMatrix select_rows(const std::vector<std::size_t>& rows) const;

  friend bool operator==(const DetectionMatrix&, const DetectionMatrix&) = default;
};

struct NamedAssertion {
  std::string id;
  SvaAst ast;
};

struct MatrixResult {
  DetectionMatrix matrix;
  /// Keyed by (assertion row, mutant column).
  std::map<std::pair<std::size_t, std::size_t>, Witness> witnesses;
};

/// Evaluates mutant columns concurrently; the result does not depend on the
/// thread count. Assertions that reference signals missing from a mutant get
/// `skipped` cells holding 0.
MatrixResult build_matrix(const std::vector<NamedAssertion>& assertions, const std::vector<Mutant>& mutants,
                          const CheckConfig& cfg);

std::string matrix_to_json(const DetectionMatrix& m);
DetectionMatrix matrix_from_json(std::string_view text);

/// One trace file per witness, named <assertion>__<mutant>.trace.
void write_witnesses(const std::filesystem::path& dir, const MatrixResult& result);
std::string witness_text(const Witness& w, std::string_view title);

/// Writes design.v, props.sv (bound checker module) and job.sby into
/// `outdir`. Never runs the external tool. Throws IoError.
void emit_external_job(const SvaAst& assertion, const RtlModule& rtl, const std::filesystem::path& outdir,
                       std::size_t depth = 20);

}  // namespace specsva
