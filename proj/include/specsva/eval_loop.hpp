// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Mutation metrics, zero-score pruning, feedback cues and the bounded
// refinement loop.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/rational.hpp>
#include <json.hpp>

#include "specsva/checker.hpp"
#include "specsva/mutate.hpp"

namespace specsva {

using Rational = boost::rational<std::int64_t>;

/// "a/b", or "a" when b == 1.
std::string to_string(const Rational& r);
/// Decimal with `places` digits, rounded half away from zero.
std::string to_decimal(const Rational& r, int places);
/// 100 * r with one decimal.
std::string to_percent(const Rational& r);

/// Row sum. Throws IndexOutOfRange.
std::size_t score(const DetectionMatrix& m, std::size_t i);
/// Throws EmptyAssertionSet.
Rational avg_mutation_score(const DetectionMatrix& m);
/// Fraction of columns with a 1. Throws EmptyMutantSet.
Rational mdr(const DetectionMatrix& m);
std::vector<std::size_t> undetected_columns(const DetectionMatrix& m);

struct Label {
  bool semantically_corr = true;
  std::string note;
};
using LabelMap = std::map<std::string, Label>;

LabelMap parse_labels(std::string_view json_text);
std::string write_labels(const LabelMap& labels);

/// |{a : fails on golden and not semantically correct}| / |final_set|
/// 0 for an empty set. Throws MissingLabel.
Rational fpr(const std::vector<std::string>& final_set, const std::map<std::string, bool>& golden_fails,
             const LabelMap& labels);

/// Indices of rows with a non-zero score, in order.
std::vector<std::size_t> prune(const DetectionMatrix& m);

/// "<operator> at <location> affecting <signals>", one per undetected
/// mutant, deduplicated by (signals, operator). Throws UnknownMutantId.
std::vector<std::string> mutation_points(const std::vector<std::string>& undetected,
                                         const std::vector<Mutant>& mutants);

enum class StopReason { MdrOne, MaxIter, NoProgress };

std::string_view to_string(StopReason r);

struct IterationState {
  int iteration = 0;
  std::vector<std::string> assertions;  // evaluated set, matrix row order
  DetectionMatrix matrix;
  std::vector<std::string> survivors;
  std::vector<std::string> undetected;
  std::vector<std::string> cues;
  std::vector<std::string> added;  // new ids entering the next iteration
  Rational mdr;
  Rational avg_pre;
  Rational avg_post;
  std::optional<StopReason> stop;
};

struct RefinementConfig {
  int max_iter = 3;
};

struct RefinementHooks {
  /// Detection rows for the given assertions over the fixed mutant set.
  std::function<DetectionMatrix(const std::vector<NamedAssertion>&)> check;
  /// New candidate assertions for the next iteration.
  std::function<std::vector<NamedAssertion>(int iteration, const std::vector<std::string>& cues)> regenerate;
};

/// check -> prune -> stop test -> cues -> regenerate -> union. Rows are
/// computed once per assertion id. Assertions whose text matches one already
/// in the set are dropped. Throws ConfigError when max_iter < 1.
std::vector<IterationState> run_refinement(std::vector<NamedAssertion> initial, const std::vector<Mutant>& mutants,
                                           const RefinementConfig& cfg, const RefinementHooks& hooks);

// Report --------------------------------------------------------------------

struct ReportRow {
  std::string design;
  std::string method;
  std::size_t generated = 0;
  std::size_t syntax_correct = 0;
  std::size_t functional_correct = 0;
  std::size_t final_count = 0;
  std::size_t mutants = 0;
  Rational avg_score_pre;
  Rational avg_score_post;
  Rational mdr;
  std::optional<Rational> fpr;  // absent: labels needed
  int iterations = 0;
  std::string stop_reason;
};

Rational syntax_rate(const ReportRow& r);
Rational functional_rate(const ReportRow& r);

nlohmann::ordered_json report_json(const std::vector<ReportRow>& rows, const std::vector<IterationState>& history);
/// Table with the fixed column set, an "Avg." row when there are several
/// rows, then per-row notes.
std::string report_markdown(const std::vector<ReportRow>& rows);

}  // namespace specsva
