// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <fmt/core.h>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "specsva/eval_loop.hpp"
#include "test_util.hpp"

using namespace specsva;
using testing_util::kind_of;

namespace {

DetectionMatrix matrix(const std::vector<std::vector<int>>& bits) {
  std::vector<std::string> rows, cols;
  for (std::size_t i = 0; i < bits.size(); ++i) rows.push_back(fmt::format("a{}", i));
  std::size_t k = bits.empty() ? 0 : bits[0].size();
  for (std::size_t j = 0; j < k; ++j) cols.push_back(fmt::format("m{:03}", j));
  DetectionMatrix m(rows, cols);
  for (std::size_t i = 0; i < bits.size(); ++i)
    for (std::size_t j = 0; j < k; ++j) m.set(i, j, bits[i][j] != 0);
  return m;
}

std::vector<Mutant> fake_mutants(std::size_t k) {
  std::vector<Mutant> out;
  for (std::size_t j = 0; j < k; ++j) {
    Mutant m;
    m.id = fmt::format("m{:03}", j);
    m.op.kind = MutationKind::ConstReplace;
    m.location = fmt::format("assign{}#e0", j);
    m.affected = {fmt::format("s{}", j)};
    out.push_back(m);
  }
  return out;
}

NamedAssertion named(const std::string& id, const std::string& body) {
  return {id, parse_sva("assert property (@(posedge clk) " + body + ");")};
}

/// Check hook backed by a fixed id -> row table.
RefinementHooks table_hooks(std::map<std::string, std::vector<int>> rows,
                            std::function<std::vector<NamedAssertion>(int, const std::vector<std::string>&)> regen) {
  RefinementHooks h;
  std::size_t k = rows.begin()->second.size();
  h.check = [rows, k](const std::vector<NamedAssertion>& as) {
    std::vector<std::string> ids;
    for (const auto& a : as) ids.push_back(a.id);
    std::vector<std::string> cols;
    for (std::size_t j = 0; j < k; ++j) cols.push_back(fmt::format("m{:03}", j));
    DetectionMatrix m(ids, cols);
    for (std::size_t i = 0; i < as.size(); ++i)
      for (std::size_t j = 0; j < k; ++j) m.set(i, j, rows.at(as[i].id)[j] != 0);
    return m;
  };
  h.regenerate = std::move(regen);
  return h;
}

}  // namespace

TEST(Metrics, Score) {
  auto m = matrix({{1, 0, 1, 0}, {0, 0, 0, 0}, {1, 1, 1, 1}});
  EXPECT_EQ(score(m, 0), 2u);
  EXPECT_EQ(score(m, 1), 0u);
  EXPECT_EQ(score(m, 2), 4u);
  EXPECT_EQ(kind_of([&] { score(m, 3); }), ErrorKind::IndexOutOfRange);
}

TEST(Metrics, AvgScore) {
  EXPECT_EQ(avg_mutation_score(matrix({{1, 1, 0}, {0, 0, 0}, {1, 0, 0}})), Rational(1));
  EXPECT_EQ(avg_mutation_score(matrix({{1, 1, 1, 1, 1}})), Rational(5));
  EXPECT_EQ(avg_mutation_score(matrix({{0, 0}, {0, 0}})), Rational(0));
  EXPECT_EQ(kind_of([] { avg_mutation_score(DetectionMatrix({}, {"m000"})); }), ErrorKind::EmptyAssertionSet);
}

TEST(Metrics, Mdr) {
  EXPECT_EQ(mdr(matrix({{0, 1, 0, 1}})), Rational(1, 2));
  EXPECT_EQ(mdr(matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})), Rational(1));
  EXPECT_EQ(mdr(matrix({{0, 0, 0}})), Rational(0));
  EXPECT_EQ(kind_of([] { mdr(DetectionMatrix({"a"}, {})); }), ErrorKind::EmptyMutantSet);
}

TEST(Metrics, AgreeWithBruteRecount) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 1 + rng() % 9, k = 1 + rng() % 12;
    int density = static_cast<int>(rng() % 5);
    std::vector<std::vector<int>> bits(n, std::vector<int>(k));
    for (auto& row : bits)
      for (auto& b : row) b = static_cast<int>(rng() % 5) < density;
    auto m = matrix(bits);
    auto brute = oracle::brute_metrics(bits, k);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(static_cast<long>(score(m, i)), brute.scores[i]);
    EXPECT_EQ(avg_mutation_score(m), Rational(brute.score_sum, static_cast<std::int64_t>(n)));
    EXPECT_EQ(mdr(m), Rational(brute.detected_columns, static_cast<std::int64_t>(k)));
  }
}

TEST(Metrics, Formatting) {
  EXPECT_EQ(to_string(Rational(6, 4)), "3/2");
  EXPECT_EQ(to_string(Rational(2)), "2");
  EXPECT_EQ(to_decimal(Rational(2, 3), 2), "0.67");
  EXPECT_EQ(to_decimal(Rational(-1, 8), 2), "-0.13");
  EXPECT_EQ(to_percent(Rational(19, 33)), "57.6");
}

TEST(Fpr, Examples) {
  std::vector<std::string> ids;
  std::map<std::string, bool> fails;
  LabelMap labels;
  for (int i = 0; i < 10; ++i) {
    auto id = fmt::format("a{}", i);
    ids.push_back(id);
    fails[id] = i < 2;
    labels[id] = Label{i != 0, ""};
  }
  // a0 fails and is wrong; a1 fails but is right (design bug).
  EXPECT_EQ(fpr(ids, fails, labels), Rational(1, 10));
  labels.erase("a5");
  EXPECT_EQ(kind_of([&] { fpr(ids, fails, labels); }), ErrorKind::MissingLabel);
  EXPECT_EQ(fpr({}, {}, {}), Rational(0));
}

TEST(Fpr, BoundedAndNumeratorInsideFailing) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 1 + rng() % 10;
    std::vector<std::string> ids;
    std::map<std::string, bool> fails;
    LabelMap labels;
    std::int64_t failing = 0, expected = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto id = fmt::format("a{}", i);
      ids.push_back(id);
      fails[id] = rng() % 2;
      labels[id] = Label{rng() % 2 == 0, ""};
      failing += fails[id];
      expected += fails[id] && !labels[id].semantically_corr;
    }
    auto r = fpr(ids, fails, labels);
    EXPECT_GE(r, Rational(0));
    EXPECT_LE(r, Rational(failing, static_cast<std::int64_t>(n)));
    EXPECT_EQ(r, Rational(expected, static_cast<std::int64_t>(n)));
  }
}

TEST(Labels, RoundTrip) {
  LabelMap l{{"x", {false, "too strict"}}, {"y", {true, ""}}};
  auto back = parse_labels(write_labels(l));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_FALSE(back["x"].semantically_corr);
  EXPECT_EQ(back["x"].note, "too strict");
}

TEST(Prune, Examples) {
  EXPECT_EQ(prune(matrix({{1, 1, 0}, {0, 0, 0}, {1, 0, 0}})), (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(prune(matrix({{0, 0}, {0, 0}})).empty());
  EXPECT_EQ(prune(matrix({{1, 0}, {0, 1}})), (std::vector<std::size_t>{0, 1}));
}

TEST(Prune, KeepsDetectedColumns) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 1 + rng() % 8, k = 1 + rng() % 8;
    std::vector<std::vector<int>> bits(n, std::vector<int>(k));
    for (auto& row : bits)
      for (auto& b : row) b = rng() % 4 == 0;
    auto m = matrix(bits);
    auto keep = prune(m);
    for (std::size_t i = 0; i < n; ++i)
      if (score(m, i) > 0) EXPECT_NE(std::find(keep.begin(), keep.end(), i), keep.end());
    EXPECT_EQ(undetected_columns(m), undetected_columns(m.select_rows(keep)));
  }
}

TEST(MutationPoints, CounterResetBranch) {
  auto rtl = parse_rtl(testing_util::fixture("fixtures/rtl/counter.v"));
  auto ms = generate_mutants(rtl, 300, 1);
  std::string id;
  for (const auto& m : ms)
    if (m.op.kind == MutationKind::CondNegate && m.location == "proc0/if0") id = m.id;
  ASSERT_FALSE(id.empty());
  EXPECT_EQ(mutation_points({id}, ms), (std::vector<std::string>{"CondNegate at proc0/if0 affecting count"}));
  EXPECT_TRUE(mutation_points({}, ms).empty());
  EXPECT_EQ(kind_of([&] { mutation_points({"m999"}, ms); }), ErrorKind::UnknownMutantId);
}

TEST(MutationPoints, DedupBySignalAndOperator) {
  auto ms = fake_mutants(3);
  ms[1].affected = ms[0].affected;
  auto cues = mutation_points({"m000", "m001", "m002"}, ms);
  EXPECT_EQ(cues.size(), 2u);
}

TEST(Refinement, FeedbackReachesMdrOne) {
  auto ms = fake_mutants(4);
  auto hooks = table_hooks({{"a0", {1, 1, 0, 0}}, {"a1", {0, 0, 0, 0}}, {"f1", {0, 0, 1, 1}}},
                           [](int, const std::vector<std::string>& cues) {
                             EXPECT_EQ(cues.size(), 2u);
                             return std::vector<NamedAssertion>{named("f1", "c |-> d")};
                           });
  auto h = run_refinement({named("a0", "a |-> b"), named("a1", "b |-> a")}, ms, {3}, hooks);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].undetected, (std::vector<std::string>{"m002", "m003"}));
  EXPECT_EQ(h[0].survivors, (std::vector<std::string>{"a0"}));
  EXPECT_EQ(h[0].added, (std::vector<std::string>{"f1"}));
  EXPECT_EQ(h[0].avg_pre, Rational(1));
  EXPECT_EQ(h[0].avg_post, Rational(2));
  EXPECT_EQ(h[1].assertions, (std::vector<std::string>{"a0", "f1"}));
  EXPECT_EQ(h[1].mdr, Rational(1));
  EXPECT_EQ(h[1].stop, StopReason::MdrOne);
}

TEST(Refinement, SingleIteration) {
  auto ms = fake_mutants(2);
  auto hooks = table_hooks({{"a0", {0, 0}}}, [](int, const std::vector<std::string>&) {
    ADD_FAILURE() << "no regeneration expected";
    return std::vector<NamedAssertion>{};
  });
  auto h = run_refinement({named("a0", "a |-> b")}, ms, {1}, hooks);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].stop, StopReason::MaxIter);
  EXPECT_EQ(kind_of([&] { run_refinement({}, ms, {0}, hooks); }), ErrorKind::ConfigError);
}

TEST(Refinement, IdenticalAnswersStopWithoutProgress) {
  auto ms = fake_mutants(2);
  auto hooks = table_hooks({{"a0", {1, 0}}, {"r1", {1, 0}}}, [](int, const std::vector<std::string>&) {
    return std::vector<NamedAssertion>{named("r1", "a |-> b")};
  });
  auto h = run_refinement({named("a0", "a |-> b")}, ms, {3}, hooks);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_TRUE(h[0].added.empty());
  EXPECT_EQ(h[1].stop, StopReason::NoProgress);
}

TEST(Refinement, MdrNeverDecreases) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 100; ++t) {
    std::size_t k = 2 + rng() % 6;
    auto ms = fake_mutants(k);
    std::map<std::string, std::vector<int>> rows;
    for (int i = 0; i < 12; ++i) {
      std::vector<int> row(k);
      for (auto& b : row) b = rng() % 4 == 0;
      rows[fmt::format("x{}", i)] = row;
    }
    int next = 1;
    auto hooks = table_hooks(rows, [&](int, const std::vector<std::string>&) {
      std::vector<NamedAssertion> batch;
      for (int c = 0; c < 2 && next < 12; ++c, ++next)
        batch.push_back(named(fmt::format("x{}", next), fmt::format("a |-> ##{} b", next)));
      return batch;
    });
    auto h = run_refinement({named("x0", "a |-> b")}, ms, {5}, hooks);
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_GE(h[i].mdr, h[i - 1].mdr);
    EXPECT_TRUE(h.back().stop.has_value());
  }
}

TEST(Report, MarkdownColumns) {
  ReportRow r;
  r.design = "counter";
  r.method = "specsva";
  r.generated = 4;
  r.syntax_correct = 4;
  r.functional_correct = 3;
  r.final_count = 3;
  r.mutants = 33;
  r.avg_score_pre = Rational(5, 2);
  r.avg_score_post = Rational(10, 3);
  r.mdr = Rational(1);
  r.fpr = Rational(0);
  r.iterations = 2;
  r.stop_reason = "mdr_one";
  auto md = report_markdown({r});
  for (const char* col : {"Design", "Method", "Syntax", "Functional", "Avg. Mutation Score", "MDR", "FPR"})
    EXPECT_NE(md.find(col), std::string::npos) << col;
  EXPECT_NE(md.find("100.0"), std::string::npos);
  EXPECT_EQ(syntax_rate(r), Rational(1));
  EXPECT_EQ(functional_rate(r), Rational(3, 4));
  r.fpr.reset();
  auto j = report_json({r}, {});
  EXPECT_TRUE(j["rows"][0]["fpr"].is_null());
}
