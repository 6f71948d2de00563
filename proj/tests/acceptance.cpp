// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <algorithm>
#include <map>
#include <random>
#include <string>

#include <fmt/core.h>
#include <json.hpp>

#include "oracles.hpp"
#include "specsva/analyzers.hpp"
#include "specsva/error.hpp"
#include "specsva/eval_loop.hpp"
#include "specsva/merge.hpp"
#include "specsva/mutate.hpp"
#include "specsva/pipeline.hpp"
#include "specsva/svagen.hpp"
#include "test_util.hpp"

using namespace specsva;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

// 1 -------------------------------------------------------------------------

Outcome read_valid_template() {
  GenerationRequest req;
  req.signal = "read_valid";
  req.triplet = {"read_req is high && arbiter_grant is low", "read_valid must be high",
                 "between 2 and 4 cycles, and hold for >=2 cycles"};
  auto r = synthesize_deterministic(req);
  const std::string want = "assert property (@(posedge clk)(read_req && !arbiter_grant) |-> ##[2:4] read_valid[*2]);";
  auto got = render_sva(r.ast);
  if (normalize_whitespace(got) != normalize_whitespace(want)) return fail("got " + got);
  if (r.pattern != AssertionPattern::Implication) return fail("pattern " + std::string(to_string(r.pattern)));
  return {true, got};
}

// 2 -------------------------------------------------------------------------

Outcome irq_waveform() {
  auto c = analyze_timing({{"ien", Edge::Rise, 44}, {"irq_flag", Edge::Rise, 44}, {"irq_flag", Edge::Fall, 51}});
  const std::string want = "ien => F[0:1] irq_flag && G[0:5] irq_flag";
  if (c.formula != want) return fail("got " + c.formula);
  return {true, c.formula};
}

// 3 -------------------------------------------------------------------------

Outcome ack_out_merge() {
  auto recs = parse_records(testing_util::fixture("fixtures/ack_out/records.jsonl")).second;
  auto s = merge_signal("ack_out", recs);
  std::vector<std::string> bad;
  auto expect = [&](const char* field, const std::string& got, const std::string& want) {
    if (got != want) bad.push_back(fmt::format("{}='{}'", field, got));
  };
  expect("name", s.name, "ack_out");
  expect("width", std::to_string(s.width), "1");
  expect("direction", s.direction, "output");
  expect("default", s.default_value, "0");
  expect("category", s.category, "control signal");
  expect("control_logic", s.control_logic, "state == READ && data_valid");
  expect("fsm", s.fsm_transitions.size() == 1 ? s.fsm_transitions[0].source + " --(" + s.fsm_transitions[0].condition +
                                                    ")--> " + s.fsm_transitions[0].destination
                                              : "?",
         "READ --(data_valid)--> SEND_ACK");
  expect("timing", s.timing_constraint, "##[1:2] ack_out[*2]");
  expect("temporal_logic", s.temporal_logic, "F[1:2] ack_out && G[0:1] ack_out");
  expect("natural_language", s.natural_language,
         "If data_valid is asserted during READ, then ack_out must be asserted within 2 cycles and held for at least 1 "
         "cycle.");
  std::string roles;
  for (auto r : s.roles) roles += std::string(to_string(r)) + " ";
  expect("roles", roles, "responder bounded-delay stabilizer ");
  expect("precondition", s.intent ? s.intent->precondition : "", "state == READ && data_valid");
  expect("consequence", s.intent ? s.intent->consequence : "", "ack_out == 1");
  expect("triplet timing", s.intent ? s.intent->timing : "", "##[1:2] ack_out[*2]");
  std::string trace;
  for (const auto& r : s.traceability) trace += r.render() + "; ";
  expect("traceability", trace,
         "Text Segment: Section 2.1; FSM Diagram: Figure 3; Timing Waveform: Figure 5; Formal Formula: Equation (2); "
         "Interface Table: Table 1; ");
  if (!bad.empty()) return fail(util::join(bad, ", "));
  return {true, "15 fields match"};
}

// 4 -------------------------------------------------------------------------

Outcome evaluator_oracle() {
  auto suite = oracle::generated_suite(25, 2025);
  auto traces = oracle::all_traces(6);
  std::size_t pairs = 0;
  for (const auto& text : suite) {
    auto ast = parse_sva(text);
    for (const auto& tr : traces) {
      ++pairs;
      auto got = eval_sva(ast, tr);
      auto want = oracle::naive_eval(ast, tr);
      if (!(got == want)) return fail(fmt::format("{} disagrees on\n{}", text, write_trace(tr)));
    }
  }
  return {true, fmt::format("{} assertions x {} traces = {} pairs agree", suite.size(), traces.size(), pairs)};
}

// 5 -------------------------------------------------------------------------

Outcome metrics() {
  std::mt19937_64 rng(555);
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = 1 + rng() % 50, k = 1 + rng() % 50;
    int density = static_cast<int>(rng() % 11);
    std::vector<std::vector<int>> bits(n, std::vector<int>(k));
    std::vector<std::string> rows, cols;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(fmt::format("a{}", i));
    for (std::size_t j = 0; j < k; ++j) cols.push_back(fmt::format("m{}", j));
    DetectionMatrix m(rows, cols);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        bits[i][j] = static_cast<int>(rng() % 10) < density;
        m.set(i, j, bits[i][j] != 0);
      }
    auto brute = oracle::brute_metrics(bits, k);
    for (std::size_t i = 0; i < n; ++i)
      if (static_cast<long>(score(m, i)) != brute.scores[i]) return fail(fmt::format("score mismatch, matrix {}", t));
    if (avg_mutation_score(m) != Rational(brute.score_sum, static_cast<std::int64_t>(n)))
      return fail(fmt::format("avg score mismatch, matrix {}", t));
    if (mdr(m) != Rational(brute.detected_columns, static_cast<std::int64_t>(k)))
      return fail(fmt::format("mdr mismatch, matrix {}", t));
  }
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = rng() % 51;
    std::vector<std::string> ids;
    std::map<std::string, bool> fails;
    LabelMap labels;
    std::int64_t bad = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto id = fmt::format("a{}", i);
      ids.push_back(id);
      fails[id] = rng() % 3 == 0;
      labels[id] = Label{rng() % 2 == 0, ""};
      if (fails[id] && !labels[id].semantically_corr) ++bad;
    }
    Rational want = n == 0 ? Rational(0) : Rational(bad, static_cast<std::int64_t>(n));
    if (fpr(ids, fails, labels) != want) return fail(fmt::format("fpr mismatch, set {}", t));
  }
  return {true, "1000 matrices and 1000 labeled sets match exactly"};
}

// 6 -------------------------------------------------------------------------

Outcome mutation_budget() {
  auto rtl = parse_rtl(testing_util::fixture("fixtures/rtl/handshake_fsm.v"));
  auto ms = generate_mutants(rtl, 300, 1);
  if (ms.size() < 100 || ms.size() > 300) return fail(fmt::format("{} mutants", ms.size()));
  std::mt19937_64 rng(6);
  for (const auto& m : ms) {
    if (oracle::module_diff(rtl, m.module) != 1) return fail(m.id + " is not a single edit");
    auto back = parse_rtl(render_rtl(m.module));
    Stimulus s;
    for (const auto* d : back.stimulus_inputs()) s.inputs.push_back(d->name);
    for (int c = 0; c < 8; ++c) {
      std::vector<std::uint64_t> row;
      for (std::size_t i = 0; i < s.inputs.size(); ++i) row.push_back(rng());
      s.rows.push_back(row);
    }
    simulate(back, s);
  }
  return {true, fmt::format("{} mutants, all single-edit and simulable", ms.size())};
}

// 7 -------------------------------------------------------------------------

Outcome refinement() {
  auto demo = testing_util::source_dir() / "demo/counter";
  auto cfg = load_config(demo / "config.json");
  cfg.output = testing_util::scratch_dir("acceptance_demo");
  cfg.max_iter = 3;
  Pipeline(cfg).run();
  auto report = nlohmann::json::parse(util::read_file(cfg.output / "report/report.json"));
  const auto& iters = report.at("iterations");
  if (iters.empty() || iters.size() > 3) return fail(fmt::format("{} iterations", iters.size()));
  auto parse_rational = [](const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  };
  std::vector<std::string> trail;
  Rational prev(-1);
  for (const auto& it : iters) {
    auto m = parse_rational(it.at("mdr").get<std::string>());
    if (m < prev) return fail("MDR decreased");
    prev = m;
    trail.push_back(to_percent(m) + "%");
  }
  std::string stop = report["rows"][0].value("stop_reason", "");
  if (stop.empty()) return fail("no stop reason");

  auto last = iters.size() - 1;
  auto matrix = matrix_from_json(util::read_file(cfg.output / fmt::format("matrix/iter{}.json", last)));
  auto final_set = parse_assertion_file(util::read_file(cfg.output / "assertions/final.sva"));
  if (final_set.empty()) return fail("empty final set");
  for (const auto& e : final_set) {
    auto row = std::find(matrix.assertions.begin(), matrix.assertions.end(), e.id);
    if (row == matrix.assertions.end()) return fail(e.id + " missing from the last matrix");
    auto i = static_cast<std::size_t>(row - matrix.assertions.begin());
    int ones = 0;
    for (std::size_t j = 0; j < matrix.k(); ++j) ones += matrix.cells[i * matrix.k() + j];
    if (ones == 0) return fail(e.id + " has score 0 but is in the final set");
  }
  return {true, fmt::format("MDR {} over {} iteration(s), stop {}, {} final assertions", util::join(trail, " -> "),
                            iters.size(), stop, final_set.size())};
}

// 8 -------------------------------------------------------------------------

Outcome reporting_scope() {
  auto readme = testing_util::fixture("README.md");
  for (const char* needle : {"not reproducible", "84.3%", "85.6%", "--no-rag", "--no-cot", "--max-iter 1"})
    if (readme.find(needle) == std::string::npos) return fail(std::string("README lacks '") + needle + "'");

  const std::string header =
      "| Design | Method | #SVAs Gen. | Syntax Correctness (%) | Functional Correctness (%) | Avg. Mutation Score | "
      "MDR (%) | FPR (%) |";
  ReportRow row;
  row.design = "d";
  row.method = "m";
  if (report_markdown({row}).find(header) == std::string::npos) return fail("report header differs");

  auto demo = testing_util::source_dir() / "demo/counter";
  auto cfg = load_config(demo / "config.json");
  cfg.output = testing_util::scratch_dir("acceptance_ablation");
  ConfigOverrides o;
  o.no_rag = true;
  o.no_cot = true;
  o.max_iter = 1;
  apply_overrides(cfg, o);
  Pipeline(cfg).run();
  auto report = nlohmann::json::parse(util::read_file(cfg.output / "report/report.json"));
  if (report["rows"][0]["iterations"] != 1) return fail("--max-iter 1 ran more than one iteration");
  if (report["rows"][0]["method"] != "specsva (no RAG, no CoT, 1 iter)") return fail("ablation label missing");
  return {true, "README statement present, column set identical, ablation switches run"};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    double limit_s;  // 0: no time limit
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "deterministic synthesis of the read_valid triplet", 1, read_valid_template},
      {2, "timing formula from the ien/irq_flag waveform", 1, irq_waveform},
      {3, "merged ack_out specification", 0, ack_out_merge},
      {4, "eval_sva against the quantifier oracle", 60, evaluator_oracle},
      {5, "metric arithmetic against brute-force recounts", 0, metrics},
      {6, "mutant count on the FSM fixture", 0, mutation_budget},
      {7, "refinement loop on the mock fixture", 120, refinement},
      {8, "reporting scope and ablation switches", 0, reporting_scope},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && c.limit_s > 0 && secs >= c.limit_s) o = fail(fmt::format("took {:.3f} s, limit {} s", secs, c.limit_s));
    failed += !o.pass;
    std::printf("criterion %d: %s  %s (%.3f s)\n    %s\n", c.number, o.pass ? "PASS" : "FAIL", c.name, secs,
                o.detail.c_str());
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
