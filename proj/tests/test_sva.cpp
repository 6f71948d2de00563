// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "specsva/error.hpp"
#include "specsva/sva.hpp"

using namespace specsva;

namespace {

const char* kReadValid =
    "assert property (@(posedge clk)(read_req && !arbiter_grant) |-> ##[2:4]read_valid[*2]);";

Trace read_valid_trace(std::size_t len) {
  return Trace({"read_req", "arbiter_grant", "read_valid"}, {1, 1, 1}, len);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::StageError;
}

}  // namespace

TEST(SvaParse, ReadValidStructure) {
  auto ast = parse_sva(kReadValid);
  ASSERT_TRUE(ast.antecedent);
  EXPECT_EQ(ast.clock, "clk");
  ASSERT_EQ(ast.consequent.terms.size(), 1u);
  EXPECT_EQ(ast.consequent.terms[0].delay, (DelayRange{2, 4}));
  EXPECT_EQ(ast.consequent.terms[0].repeat, 2);
  EXPECT_EQ(ast.signals(), (std::vector<std::string>{"read_req", "arbiter_grant", "read_valid"}));
}

TEST(SvaParse, MinimalImplication) {
  auto ast = parse_sva("assert property (@(posedge clk) a |-> b);");
  ASSERT_TRUE(ast.antecedent);
  EXPECT_EQ(ast.consequent.terms[0].delay, (DelayRange{0, 0}));
}

TEST(SvaParse, TruncatedIsSyntaxError) {
  EXPECT_EQ(kind_of([] { parse_sva("assert property (a |->"); }), ErrorKind::SyntaxError);
}

TEST(SvaParse, NonOverlapDesugarsToDelayOne) {
  EXPECT_EQ(parse_sva("assert property (@(posedge clk) a |=> b);"),
            parse_sva("assert property (@(posedge clk) a |-> ##1 b);"));
}

TEST(SvaParse, FixedDelayNormalizes) {
  auto ast = parse_sva("assert property (@(posedge clk) a |-> ##[3:3] b);");
  EXPECT_EQ(ast.consequent.terms[0].delay, (DelayRange{3, 3}));
  EXPECT_NE(render_sva(ast).find("##3 b"), std::string::npos);
}

TEST(SvaRender, ReadValidDiffersOnlyInSpacing) {
  auto text = render_sva(parse_sva(kReadValid));
  EXPECT_EQ(normalize_whitespace(text), normalize_whitespace(kReadValid));
}

TEST(SvaRender, RoundTripAndIdempotence) {
  for (const auto& t : oracle::generated_suite(200, 7)) {
    auto ast = parse_sva(t);
    auto once = render_sva(ast);
    EXPECT_EQ(parse_sva(once), ast) << t;
    EXPECT_EQ(render_sva(parse_sva(once)), once) << t;
  }
}

TEST(SvaEval, ReadValidPass) {
  auto tr = read_valid_trace(8);
  tr.set("read_req", 0, 1);
  tr.set("read_valid", 2, 1);
  tr.set("read_valid", 3, 1);
  EXPECT_EQ(eval_sva(parse_sva(kReadValid), tr), Verdict::pass());
}

TEST(SvaEval, ReadValidVacuous) {
  EXPECT_EQ(eval_sva(parse_sva(kReadValid), read_valid_trace(8)), Verdict::vacuous());
}

TEST(SvaEval, ReadValidFailAtStart) {
  auto tr = read_valid_trace(8);
  tr.set("read_req", 0, 1);
  tr.set("read_valid", 3, 1);
  EXPECT_EQ(eval_sva(parse_sva(kReadValid), tr), Verdict::fail(0));
}

TEST(SvaEval, ObligationPastEndFails) {
  Trace tr({"a", "b"}, {1, 1}, 3);
  tr.set("a", 2, 1);
  auto ast = parse_sva("assert property (@(posedge clk) a |-> ##1 b);");
  EXPECT_TRUE(eval_sva(ast, tr).failed());
  EvalOptions opts;
  opts.complete_windows_only = true;
  EXPECT_EQ(eval_sva(ast, tr, {}, opts), Verdict::vacuous());
}

TEST(SvaEval, UnknownSignal) {
  Trace tr({"a"}, {1}, 2);
  EXPECT_EQ(kind_of([&] { eval_sva(parse_sva("assert property (@(posedge clk) a |-> zz);"), tr); }),
            ErrorKind::UnknownSignal);
}

TEST(SvaEval, MatchesQuantifierOracleOnAllShortTraces) {
  auto traces = oracle::all_traces(5);
  for (const auto& text : oracle::generated_suite(25, 11)) {
    auto ast = parse_sva(text);
    for (const auto& tr : traces) {
      auto got = eval_sva(ast, tr);
      auto want = oracle::naive_eval(ast, tr);
      ASSERT_EQ(got, want) << text << "\n" << write_trace(tr);
    }
  }
}

TEST(SvaEval, PastBeforeStartReadsZero) {
  Trace tr({"a"}, {1}, 3);
  tr.set("a", 0, 1);
  tr.set("a", 1, 1);
  tr.set("a", 2, 1);
  EXPECT_TRUE(eval_sva(parse_sva("assert property (@(posedge clk) $stable(a));"), tr).failed());
}

TEST(Temporal, IrqFormulaOnWaveform) {
  Trace tr({"ien", "irq_flag"}, {1, 1}, 60);
  for (std::size_t c = 44; c < 60; ++c) tr.set("ien", c, 1);
  for (std::size_t c = 44; c < 51; ++c) tr.set("irq_flag", c, 1);
  auto f = parse_temporal("F[0:1] irq_flag && G[0:5] irq_flag");
  EXPECT_TRUE(eval_temporal(f, tr, 44));
  EXPECT_FALSE(eval_temporal(parse_temporal("G[0:7] irq_flag"), tr, 44));
}

TEST(Temporal, SingletonAlways) {
  for (const auto& tr : oracle::all_traces(3))
    for (std::size_t t = 0; t < tr.length(); ++t)
      EXPECT_EQ(eval_temporal(parse_temporal("G[0:0] a"), tr, t), tr.at(0, t) != 0);
}

TEST(Temporal, TruncatedEventuallyIsFalse) {
  Trace tr({"p"}, {1}, 3);
  EXPECT_FALSE(eval_temporal(parse_temporal("F[0:2] p"), tr, 2));
}

TEST(Temporal, RenderRoundTrip) {
  const char* text = "ien => F[0:1] irq_flag && G[0:5] irq_flag";
  EXPECT_EQ(render_temporal(parse_temporal(text)), text);
}

TEST(TlToSva, IrqHoldMapping) {
  auto ast = tl_to_sva(parse_temporal("ien => F[0:1] irq_flag && G[0:5] irq_flag"));
  EXPECT_EQ(normalize_whitespace(render_sva(ast)),
            normalize_whitespace("assert property (@(posedge clk) ien |-> ##[0:1] irq_flag[*6]);"));
}

TEST(TlToSva, PlainWindow) {
  auto ast = tl_to_sva(parse_temporal("a => F[2:4] b"));
  EXPECT_EQ(normalize_whitespace(render_sva(ast)), normalize_whitespace("assert property (@(posedge clk) a |-> ##[2:4] b);"));
}

TEST(TlToSva, NestedShapeRejected) {
  EXPECT_EQ(kind_of([] { tl_to_sva(parse_temporal("a => G[0:2] F[0:1] b")); }), ErrorKind::UnsupportedShape);
}

// The translation is exact against the window-anchored reading
// F[a:b](s && G[0:h] s): the hold starts where the eventuality is met.
TEST(TlToSva, ExactAgainstAnchoredHold) {
  struct Case {
    const char* constraint;
    const char* anchored;
  };
  const Case cases[] = {{"a => F[0:2] b", "a => F[0:2] b"},
                        {"a => F[1:3] b", "a => F[1:3] b"},
                        {"a => F[0:1] b && G[0:2] b", "a => F[0:1] (b && G[0:2] b)"},
                        {"a => F[1:2] b && G[0:1] b", "a => F[1:2] (b && G[0:1] b)"}};
  for (const auto& c : cases) {
    auto bound = BoundAssertion(tl_to_sva(parse_temporal(c.constraint)), {"a", "b"}, {1, 1});
    auto anchored = parse_temporal(c.anchored);
    for (const auto& tr : oracle::all_traces(6)) {
      for (std::size_t t = 0; t < tr.length(); ++t) {
        if (!tr.at(0, t)) continue;
        ASSERT_EQ(eval_temporal(anchored, tr, t), !bound.eval_at(tr, t).failed())
            << c.constraint << " t=" << t << "\n" << write_trace(tr);
      }
    }
  }
}

// Read literally, G in the conjunction is anchored at the trigger cycle, and
// the two readings disagree in both directions.
TEST(TlToSva, LiteralConjunctionDiverges) {
  Trace tr({"a", "b"}, {1, 1}, 4);
  tr.set("a", 0, 1);
  tr.set("b", 0, 1);
  tr.set("b", 1, 1);
  auto f = parse_temporal("a => F[1:2] b && G[0:1] b");
  EXPECT_TRUE(eval_temporal(f, tr, 0));
  EXPECT_TRUE(BoundAssertion(tl_to_sva(f), {"a", "b"}, {1, 1}).eval_at(tr, 0).failed());
}

TEST(TlToSva, HoldTranslationCounterexample) {
  // b low at the trigger, high for the next six cycles.
  Trace tr({"ien", "irq_flag"}, {1, 1}, 8);
  tr.set("ien", 0, 1);
  for (std::size_t c = 1; c <= 6; ++c) tr.set("irq_flag", c, 1);
  auto f = parse_temporal("ien => F[0:1] irq_flag && G[0:5] irq_flag");
  EXPECT_FALSE(eval_temporal(f, tr, 0));
  EXPECT_FALSE(BoundAssertion(tl_to_sva(f), {"ien", "irq_flag"}, {1, 1}).eval_at(tr, 0).failed());
}

TEST(AssertionFile, CommentsAndLabels) {
  auto entries = parse_assertion_file("// header\n\nx1: assert property (@(posedge clk) a);\nnot sva\n");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].id, "x1");
  EXPECT_TRUE(entries[0].ast);
  EXPECT_FALSE(entries[1].ast);
  EXPECT_FALSE(entries[1].parse_error.empty());
}

TEST(TraceFormat, RoundTrip) {
  Trace tr({"rst", "count"}, {1, 4}, 3);
  tr.set("rst", 0, 1);
  tr.set("count", 2, 9);
  EXPECT_EQ(parse_trace(write_trace(tr)), tr);
}
