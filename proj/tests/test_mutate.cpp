// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <set>

#include <fmt/core.h>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "specsva/mutate.hpp"
#include "test_util.hpp"

using namespace specsva;
using testing_util::kind_of;

namespace {

RtlModule load(const std::string& rel) { return parse_rtl(testing_util::fixture(rel)); }

bool has_mutant_text(const std::vector<Mutant>& ms, const std::string& needle) {
  for (const auto& m : ms)
    if (render_rtl(m.module).find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Mutate, CounterOperators) {
  auto ms = generate_mutants(load("fixtures/rtl/counter.v"), 300, 1);
  EXPECT_TRUE(has_mutant_text(ms, "count <= count - 1"));
  EXPECT_TRUE(has_mutant_text(ms, "if (!rst)"));
  bool reset_delete = false;
  for (const auto& m : ms) reset_delete |= m.op.kind == MutationKind::ResetBranchDelete;
  EXPECT_TRUE(reset_delete);
}

TEST(Mutate, FsmCountInBand) {
  auto ms = generate_mutants(load("fixtures/rtl/handshake_fsm.v"), 300, 1);
  EXPECT_GE(ms.size(), 100u);
  EXPECT_LE(ms.size(), 300u);
}

TEST(Mutate, BudgetCapsAndIdsAreDense) {
  auto ms = generate_mutants(load("fixtures/rtl/handshake_fsm.v"), 40, 3);
  ASSERT_EQ(ms.size(), 40u);
  for (std::size_t i = 0; i < ms.size(); ++i) EXPECT_EQ(ms[i].id, fmt::format("m{:03}", i));
}

TEST(Mutate, Deterministic) {
  auto rtl = load("fixtures/rtl/handshake_fsm.v");
  auto a = generate_mutants(rtl, 60, 9);
  auto b = generate_mutants(rtl, 60, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].location, b[i].location);
    EXPECT_EQ(a[i].module, b[i].module);
  }
}

TEST(Mutate, SingleEditSimulableDistinct) {
  std::mt19937_64 rng(4);
  for (const char* f : {"fixtures/rtl/counter.v", "fixtures/rtl/handshake.v", "fixtures/rtl/handshake_fsm.v",
                        "demo/counter/counter.v"}) {
    auto rtl = load(f);
    auto ms = enumerate_mutants(rtl);
    ASSERT_FALSE(ms.empty()) << f;
    std::set<std::string> seen{render_rtl(rtl)};
    for (const auto& m : ms) {
      EXPECT_EQ(oracle::module_diff(rtl, m.module), 1) << f << " " << m.location;
      auto text = render_rtl(m.module);
      EXPECT_TRUE(seen.insert(text).second) << f << " duplicate " << m.location;
      auto back = parse_rtl(text);
      Stimulus s;
      for (const auto* d : back.stimulus_inputs()) s.inputs.push_back(d->name);
      for (int c = 0; c < 6; ++c) {
        std::vector<std::uint64_t> row;
        for (std::size_t i = 0; i < s.inputs.size(); ++i) row.push_back(rng() & 0xf);
        s.rows.push_back(row);
      }
      EXPECT_NO_THROW(simulate(back, s)) << f << " " << m.location;
    }
  }
}

TEST(Mutate, NoSites) {
  auto rtl = parse_rtl("module m(input a, output y);\n assign y = a;\nendmodule\n");
  EXPECT_EQ(kind_of([&] { generate_mutants(rtl, 10, 1); }), ErrorKind::NoMutationSites);
}

TEST(Mutate, ManifestRoundTrip) {
  auto rtl = load("fixtures/rtl/counter.v");
  auto ms = generate_mutants(rtl, 300, 1);
  auto dir = testing_util::scratch_dir("mutants");
  write_mutants(dir, rtl, ms, 300, 1);
  auto back = load_mutants(dir);
  ASSERT_EQ(back.size(), ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    EXPECT_EQ(back[i].id, ms[i].id);
    EXPECT_EQ(back[i].location, ms[i].location);
    EXPECT_EQ(back[i].affected, ms[i].affected);
    EXPECT_EQ(back[i].module, ms[i].module);
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  EXPECT_NE(testing_util::fixture("fixtures/rtl/counter.v").size(), 0u);
}

TEST(LineDiff, OneLineChange) {
  auto d = line_diff("a\nb\nc\n", "a\nx\nc\n");
  EXPECT_NE(d.find("-b"), std::string::npos);
  EXPECT_NE(d.find("+x"), std::string::npos);
}
