// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "specsva/rtl.hpp"
#include "test_util.hpp"

using namespace specsva;
using testing_util::kind_of;

namespace {

RtlModule load(const std::string& rel) { return parse_rtl(testing_util::fixture(rel)); }

Stimulus stimulus_for(const RtlModule& m, std::vector<std::vector<std::uint64_t>> rows) {
  Stimulus s;
  for (const auto* d : m.stimulus_inputs()) s.inputs.push_back(d->name);
  s.rows = std::move(rows);
  return s;
}

Stimulus random_stimulus(const RtlModule& m, std::size_t len, std::mt19937_64& rng) {
  Stimulus s;
  std::vector<int> widths;
  for (const auto* d : m.stimulus_inputs()) {
    s.inputs.push_back(d->name);
    widths.push_back(d->width);
  }
  for (std::size_t c = 0; c < len; ++c) {
    std::vector<std::uint64_t> row;
    for (int w : widths) row.push_back(rng() & oracle::mask(w));
    s.rows.push_back(row);
  }
  return s;
}

const char* kFixtures[] = {"fixtures/rtl/counter.v",       "fixtures/rtl/handshake.v",
                           "fixtures/rtl/handshake_late.v", "fixtures/rtl/handshake_fsm.v",
                           "fixtures/rtl/passthrough.v",    "demo/counter/counter.v"};

}  // namespace

TEST(RtlParse, Counter) {
  auto m = load("fixtures/rtl/counter.v");
  EXPECT_EQ(m.name, "counter");
  EXPECT_EQ(m.processes.size(), 1u);
  int regs = 0;
  for (const auto& s : m.signals) regs += s.is_reg;
  EXPECT_EQ(regs, 1);
  EXPECT_EQ(m.find("count")->width, 4);
  EXPECT_EQ(m.clock(), "clk");
}

TEST(RtlParse, InitialIsUnsupported) {
  try {
    parse_rtl("module m(input clk, output reg q);\n initial q = 0;\n always @(posedge clk) q <= !q;\nendmodule\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedConstruct);
    EXPECT_NE(std::string(e.what()).find("initial"), std::string::npos);
  }
}

TEST(RtlParse, Errors) {
  EXPECT_EQ(kind_of([] { parse_rtl("module m(input a;"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { parse_rtl("module m(input a, output y);\n assign y = a;\n assign y = !a;\nendmodule\n"); }),
            ErrorKind::InvalidDesign);
  EXPECT_EQ(kind_of([] { parse_rtl("module m(input a, output y);\n assign y = a;\n assign z = a;\nendmodule\n"); }),
            ErrorKind::InvalidDesign);
  EXPECT_EQ(kind_of([] { parse_rtl("module m(input a, output y, output z);\n assign y = z;\n assign z = y;\nendmodule\n"); }),
            ErrorKind::InvalidDesign);
}

TEST(RtlParse, FsmHasThreeStates) {
  auto m = load("fixtures/rtl/handshake_fsm.v");
  auto k = m.constants();
  EXPECT_EQ(m.find_param("IDLE")->value, 0u);
  EXPECT_EQ(m.find_param("REQ")->value, 1u);
  EXPECT_EQ(m.find_param("GRANT")->value, 2u);
  EXPECT_EQ(m.find("state")->width, 2);
}

TEST(RtlRender, RoundTrip) {
  for (const char* f : kFixtures) {
    auto m = load(f);
    auto text = render_rtl(m);
    EXPECT_EQ(parse_rtl(text), m) << f;
    EXPECT_EQ(render_rtl(parse_rtl(text)), text) << f;
  }
}

TEST(Simulate, CounterReset) {
  auto m = load("fixtures/rtl/counter.v");
  auto tr = simulate(m, stimulus_for(m, {{1}, {0}, {0}, {0}, {0}}));
  std::vector<std::uint64_t> got;
  for (std::size_t c = 0; c < 5; ++c) got.push_back(tr.value("count", c));
  EXPECT_EQ(got, (std::vector<std::uint64_t>{0, 0, 1, 2, 3}));
}

TEST(Simulate, PassthroughZero) {
  auto m = load("fixtures/rtl/passthrough.v");
  auto tr = simulate(m, stimulus_for(m, {{0, 0}, {0, 0}, {0, 0}}));
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(tr.value("y", c), 0u);
    EXPECT_EQ(tr.value("z", c), 0u);
  }
}

TEST(Simulate, FsmWalk) {
  auto m = load("fixtures/rtl/handshake_fsm.v");
  // inputs: rst start ack abort len data_in
  auto tr = simulate(m, stimulus_for(m, {{0, 1, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0}, {0, 0, 0, 0, 0, 0}}));
  EXPECT_EQ(tr.value("state", 0), 0u);
  EXPECT_EQ(tr.value("state", 1), 1u);
  EXPECT_EQ(tr.value("state", 2), 2u);
}

TEST(Simulate, MatchesReferenceWalker) {
  std::mt19937_64 rng(2024);
  for (const char* f : kFixtures) {
    auto m = load(f);
    Simulator sim(m);
    for (int i = 0; i < 1000; ++i) {
      auto stim = random_stimulus(m, 1 + rng() % 12, rng);
      ASSERT_EQ(sim.run(stim), oracle::reference_simulate(m, stim)) << f << "\n" << write_stimulus(stim);
    }
  }
}
