// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <fmt/core.h>

#include <gtest/gtest.h>

#include "specsva/analyzers.hpp"
#include "specsva/classify.hpp"
#include "specsva/sva.hpp"
#include "test_util.hpp"

using namespace specsva;
using testing_util::kind_of;

namespace {

ContentBlock block(std::string content, Modality m = Modality::Text) {
  ContentBlock b;
  b.content = std::move(content);
  b.modality = m;
  b.semantic_category = SemanticCategory(SemanticCategory::Kind::ModuleInterface);
  return b;
}

std::vector<TimingEvent> events(std::initializer_list<TimingEvent> e) { return e; }

}  // namespace

TEST(TextAnalyzer, MockResponseMapsToPorts) {
  auto b = block("The output `ack` (1 bit) acknowledges transfer.");
  LlmClient client(MockMode{{},
                            {{"analyze", {"acknowledges transfer"},
                              "name: xfer\nports:\n  - name: ack\n    direction: output\n    width: 1\n"
                              "    description: acknowledges transfer\n"}}});
  auto m = analyze_text(b, &client);
  ASSERT_EQ(m.ports.size(), 1u);
  EXPECT_EQ(m.ports[0], (PortDecl{"ack", PortDirection::Output, 1, "acknowledges transfer"}));
}

TEST(TextAnalyzer, RulesExtractPort) {
  auto m = extract_module_info_rules(block("The output `ack` (1 bit) acknowledges transfer."));
  ASSERT_EQ(m.ports.size(), 1u);
  EXPECT_EQ(m.ports[0], (PortDecl{"ack", PortDirection::Output, 1, "acknowledges transfer"}));
}

TEST(TextAnalyzer, NoPortsGivesEmptyList) {
  auto m = parse_module_info("name: top\ndescription: glue logic\nports: []\n");
  EXPECT_TRUE(m.ports.empty());
  EXPECT_TRUE(extract_module_info_rules(block("Nothing about ports here.")).ports.empty());
}

TEST(TextAnalyzer, WordWidthIsUnparseable) {
  EXPECT_EQ(kind_of([] { parse_module_info("ports:\n  - name: a\n    direction: input\n    width: two\n"); }),
            ErrorKind::UnparseableResponse);
  EXPECT_EQ(kind_of([] { parse_module_info("just prose"); }), ErrorKind::UnparseableResponse);
}

TEST(TextAnalyzer, RetryThenFail) {
  auto b = block("The output `ack` (1 bit) acknowledges transfer.");
  LlmClient client(MockMode{{}, {{"analyze", {}, "- not a mapping"}}});
  EXPECT_EQ(kind_of([&] { analyze_text(b, &client); }), ErrorKind::UnparseableResponse);
}

TEST(TextAnalyzer, OpenImplementationKeys) {
  auto m = parse_module_info("implementation:\n  reset: clears count\n  wraparound: at 15\n");
  ASSERT_EQ(m.implementation.size(), 2u);
  EXPECT_EQ(m.implementation[1], (std::pair<std::string, std::string>{"wraparound", "at 15"}));
}

TEST(TextAnalyzer, PromptLeavesBlanks) {
  auto req = build_text_prompt(block("para"));
  EXPECT_NE(req.user.find("empty list"), std::string::npos);
  EXPECT_NE(req.user.find("para"), std::string::npos);
}

TEST(FsmAnalyzer, TwoTransitions) {
  auto r = analyze_fsm(block("IDLE --(start)--> REQ; REQ --(ack)--> GRANT", Modality::Diagram));
  ASSERT_EQ(r.transitions.size(), 2u);
  EXPECT_EQ(r.transitions[0], (FsmTransition{"IDLE", "start", "REQ"}));
  EXPECT_EQ(r.transitions[1], (FsmTransition{"REQ", "ack", "GRANT"}));
  EXPECT_EQ(r.pseudocode,
            "if (state == IDLE && start) then next_state = REQ;\nif (state == REQ && ack) then next_state = GRANT;");
  EXPECT_EQ(r.states, (std::vector<std::string>{"IDLE", "REQ", "GRANT"}));
}

TEST(FsmAnalyzer, SelfLoop) {
  auto r = analyze_fsm(block("A --(x)--> A", Modality::Diagram));
  ASSERT_EQ(r.transitions.size(), 1u);
  EXPECT_EQ(r.transitions[0], (FsmTransition{"A", "x", "A"}));
}

TEST(FsmAnalyzer, NoArrows) {
  EXPECT_EQ(kind_of([] { analyze_fsm(block("states IDLE and REQ", Modality::Diagram)); }),
            ErrorKind::NoTransitionsFound);
}

TEST(FsmAnalyzer, OutputsLine) {
  auto r = analyze_fsm(block("IDLE --(go)--> RUN\nOutputs: RUN -> busy", Modality::Diagram));
  ASSERT_EQ(r.outputs.size(), 1u);
  EXPECT_EQ(r.outputs[0], (std::pair<std::string, std::string>{"RUN", "busy"}));
}

TEST(FsmAnalyzer, PseudocodeLineCount) {
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> n(1, 8), st(0, 4);
  for (int i = 0; i < 200; ++i) {
    std::string text;
    int k = n(rng);
    for (int j = 0; j < k; ++j) text += fmt::format("S{} --(c{})--> S{}\n", st(rng), j, st(rng));
    auto r = analyze_fsm(block(text, Modality::Diagram));
    ASSERT_EQ(r.transitions.size(), static_cast<std::size_t>(k));
    EXPECT_EQ(util::split_lines(r.pseudocode).size(), r.transitions.size());
  }
}

TEST(TimingAnalyzer, IrqWaveformByteExact) {
  auto ev = parse_timing_events("ien rise at cycle 44\nirq_flag rise at cycle 44, descend at cycle 51\n");
  EXPECT_EQ(analyze_timing(ev).formula, "ien => F[0:1] irq_flag && G[0:5] irq_flag");
}

TEST(TimingAnalyzer, HoldOfZero) {
  auto c = analyze_timing(events({{"a", Edge::Rise, 0}, {"b", Edge::Rise, 0}, {"b", Edge::Fall, 2}}));
  EXPECT_EQ(c.formula, "a => F[0:1] b && G[0:0] b");
}

TEST(TimingAnalyzer, Errors) {
  EXPECT_EQ(kind_of([] { analyze_timing(events({{"a", Edge::Fall, 3}})); }), ErrorKind::NoTriggerEvent);
  EXPECT_EQ(kind_of([] { analyze_timing(events({{"a", Edge::Rise, 3}})); }), ErrorKind::NoResponseEvent);
}

TEST(TimingAnalyzer, OutputAlwaysParses) {
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> cyc(0, 20), n(2, 6), sig(0, 3), coin(0, 2);
  for (int i = 0; i < 500; ++i) {
    std::vector<TimingEvent> ev;
    for (int k = n(rng); k > 0; --k)
      ev.push_back({fmt::format("s{}", sig(rng)), coin(rng) ? Edge::Rise : Edge::Fall, cyc(rng)});
    TemporalConstraint c;
    try {
      c = analyze_timing(ev);
    } catch (const Error& e) {
      EXPECT_TRUE(e.kind() == ErrorKind::NoTriggerEvent || e.kind() == ErrorKind::NoResponseEvent);
      continue;
    }
    EXPECT_NO_THROW(parse_temporal(c.formula)) << c.formula;
    for (const auto& w : c.responses) EXPECT_LE(w.lo, w.hi);
  }
}

TEST(TableAnalyzer, Kinds) {
  auto t = analyze_table(block("| name | direction | width |\n|---|---|---|\n| a | input | 1 |\n| b | output | 4 |"));
  EXPECT_EQ(t.kind, TableKind::Interface);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.cell(1, {"WIDTH"}), "4");
  EXPECT_EQ(analyze_table(block("| addr | reset value |\n| 0x0 | 0 |")).kind, TableKind::Register);
  EXPECT_EQ(analyze_table(block("| mode | meaning |\n| 0 | off |")).kind, TableKind::Mode);
}

TEST(TableAnalyzer, Ragged) {
  EXPECT_EQ(kind_of([] { analyze_table(block("| a | b | c |\n| 1 | 2 |")); }), ErrorKind::RaggedTable);
}

TEST(TableAnalyzer, CellsPreserved) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> cols(1, 5), rows(0, 6), len(1, 6), ch(0, 25);
  for (int i = 0; i < 200; ++i) {
    int c = cols(rng);
    std::vector<std::vector<std::string>> grid;
    std::string text;
    for (int r = rows(rng) + 1; r > 0; --r) {
      std::vector<std::string> row;
      text += "|";
      for (int k = 0; k < c; ++k) {
        std::string cell;
        for (int l = len(rng); l > 0; --l) cell += static_cast<char>('a' + ch(rng));
        row.push_back(cell);
        text += " " + cell + " |";
      }
      text += "\n";
      grid.push_back(row);
    }
    auto t = analyze_table(block(text));
    EXPECT_EQ(t.header, grid[0]);
    EXPECT_EQ(t.rows, std::vector<std::vector<std::string>>(grid.begin() + 1, grid.end()));
  }
}

TEST(FormulaAnalyzer, Examples) {
  auto f = analyze_formula(block("t_setup ≤ 2", Modality::Formula));
  EXPECT_EQ(f.lhs, "t_setup");
  EXPECT_EQ(f.relation, Relation::Le);
  EXPECT_EQ(f.rhs, "2");
  f = analyze_formula(block("latency = depth + 1", Modality::Formula));
  EXPECT_EQ(f.lhs, "latency");
  EXPECT_EQ(f.relation, Relation::Eq);
  EXPECT_EQ(f.rhs, "depth + 1");
  f = analyze_formula(block("$done = (state == DONE)$", Modality::Formula));
  EXPECT_EQ(f.lhs, "done");
  EXPECT_EQ(f.rhs, "(state == DONE)");
  EXPECT_EQ(kind_of([] { analyze_formula(block("hello world", Modality::Formula)); }), ErrorKind::NoRelationFound);
}

TEST(Records, RoundTrip) {
  auto text = testing_util::fixture("fixtures/ack_out/records.jsonl");
  auto [design, recs] = parse_records(text);
  EXPECT_EQ(design, "rd_ctrl");
  EXPECT_EQ(recs.size(), 5u);
  EXPECT_EQ(parse_records(write_records(design, recs)).second, recs);
  for (const auto& r : recs) EXPECT_EQ(record_from_json(record_to_json(r)), r);
}

TEST(Records, AckOutDocumentMatchesFixture) {
  auto dir = testing_util::source_dir() / "fixtures/ack_out";
  auto doc = load_spec(dir / "spec.jsonl");
  LlmClient client(MockMode{dir / "mock", {}});
  classify_document(doc, &client);
  auto recs = analyze_document(doc, &client);
  EXPECT_EQ(recs, parse_records(testing_util::fixture("fixtures/ack_out/records.jsonl")).second);
}
