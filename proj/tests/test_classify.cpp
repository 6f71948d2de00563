// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "specsva/classify.hpp"
#include "test_util.hpp"

using namespace specsva;
using testing_util::kind_of;

namespace {

const char* kValidText = "The module asserts `valid` for two cycles after `ready` is high. `reset` overrides this behavior.";

ContentBlock block(std::string content, std::map<std::string, std::string> hints = {}) {
  ContentBlock b;
  b.content = std::move(content);
  b.layout_hints = std::move(hints);
  return b;
}

}  // namespace

TEST(ClassifyPrompt, RequiredPhrases) {
  auto req = build_classification_prompt(block(kValidText, {{"section", "2.1"}}));
  auto all = req.system + req.user;
  EXPECT_NE(all.find("hardware specification analyst"), std::string::npos);
  EXPECT_NE(all.find("Reason step-by-step"), std::string::npos);
  for (const char* m : {"TEXT", "TABLE", "FORMULA", "DIAGRAM", "Timing Behavior", "Reset Behavior"})
    EXPECT_NE(all.find(m), std::string::npos) << m;
  EXPECT_NE(req.user.rfind(kValidText), std::string::npos);
  EXPECT_NE(req.user.find("- section: 2.1"), std::string::npos);
  EXPECT_EQ(req.tag, "classify");
}

TEST(ClassifyPrompt, HintsSectionOnlyWhenPresent) {
  EXPECT_EQ(build_classification_prompt(block("x")).user.find("Layout hints"), std::string::npos);
  auto with = build_classification_prompt(block("x", {{"block_type", "table-like"}})).user;
  EXPECT_NE(with.find("block_type: table-like"), std::string::npos);
}

TEST(ClassifyPrompt, ExampleIsConfigurable) {
  ClassifyOptions none;
  none.example_input.clear();
  auto req = build_classification_prompt(block("x"), none);
  EXPECT_EQ(req.system.find(ClassifyOptions{}.example_input), std::string::npos);
  EXPECT_NE(build_classification_prompt(block("x")).system.find(ClassifyOptions{}.example_input), std::string::npos);
}

TEST(ParseClassification, Basic) {
  auto r = parse_classification("Modality: TEXT\nSemantic category: Timing Behavior");
  EXPECT_EQ(r.modality, Modality::Text);
  EXPECT_EQ(r.category, SemanticCategory(SemanticCategory::Kind::TimingBehavior));
}

TEST(ParseClassification, LastLinesWinAndUnknownKept) {
  auto r = parse_classification(
      "Maybe Modality: TEXT at first.\nModality: TEXT\nOn reflection...\nModality: TABLE\nSemantic category: Register Map");
  EXPECT_EQ(r.modality, Modality::Table);
  EXPECT_EQ(r.category, SemanticCategory::other("Register Map"));
}

TEST(ParseClassification, Unparseable) {
  EXPECT_EQ(kind_of([] { parse_classification("I cannot classify this."); }), ErrorKind::UnparseableResponse);
}

TEST(ParseClassification, RenderRoundTrip) {
  const Modality mods[] = {Modality::Text, Modality::Table, Modality::Formula, Modality::Diagram};
  const SemanticCategory cats[] = {SemanticCategory(SemanticCategory::Kind::Architecture),
                                   SemanticCategory(SemanticCategory::Kind::ModuleInterface),
                                   SemanticCategory(SemanticCategory::Kind::ControlLogic),
                                   SemanticCategory(SemanticCategory::Kind::ConfigurationInfo),
                                   SemanticCategory::other("Power Domains")};
  for (auto m : mods)
    for (const auto& c : cats) {
      ClassificationResult r{m, c, "because"};
      auto back = parse_classification(render_classification(r));
      EXPECT_EQ(back.modality, m);
      EXPECT_EQ(back.category, c);
    }
}

TEST(ClassifyRules, Examples) {
  auto r = classify_rules(block(kValidText));
  EXPECT_EQ(r.modality, Modality::Text);
  EXPECT_EQ(r.category.kind(), SemanticCategory::Kind::TimingBehavior);

  r = classify_rules(block("IDLE --(start)--> REQ"));
  EXPECT_EQ(r.modality, Modality::Diagram);
  EXPECT_EQ(r.category.kind(), SemanticCategory::Kind::ControlLogic);

  r = classify_rules(block("| name | dir | width |\n| a | input | 1 |"));
  EXPECT_EQ(r.modality, Modality::Table);
  EXPECT_EQ(r.category.kind(), SemanticCategory::Kind::ModuleInterface);

  r = classify_rules(block("$done = (state == DONE)$"));
  EXPECT_EQ(r.modality, Modality::Formula);

  r = classify_rules(block("irq_flag rise at cycle 44, descend at cycle 51"));
  EXPECT_EQ(r.modality, Modality::Diagram);
}

TEST(ClassifyRules, Deterministic) {
  for (const char* t : {kValidText, "reset clears count", "| a |", "x"})
    EXPECT_EQ(classify_rules(block(t)), classify_rules(block(t)));
}

TEST(ClassifyDocument, MockUsesRules) {
  SpecDocument doc;
  doc.design_name = "d";
  doc.blocks = {block(kValidText), block("IDLE --(start)--> REQ")};
  LlmClient client(MockMode{});
  classify_document(doc, &client);
  for (const auto& b : doc.blocks) EXPECT_TRUE(b.classified());
  EXPECT_EQ(*doc.blocks[1].modality, Modality::Diagram);
}

TEST(ClassifyBlock, ReplayFallsBackAfterTwoBadAnswers) {
  auto dir = testing_util::scratch_dir("classify_replay");
  ContentBlock b = block("IDLE --(start)--> REQ");
  // Answer both the first request and the retry with prose.
  auto req = build_classification_prompt(b);
  util::write_file(dir / (cache_key(req, "m") + ".txt"), "no idea");
  req.user += "\n\nYour previous answer could not be read. End with the two lines 'Modality: ...' and "
              "'Semantic category: ...'.";
  util::write_file(dir / (cache_key(req, "m") + ".txt"), "still no idea");
  LlmClient client(ReplayMode{dir, "m"});
  EXPECT_EQ(classify_block(b, &client), classify_rules(b));
}

TEST(ClassifyBlock, ReplayUsesCachedAnswer) {
  auto dir = testing_util::scratch_dir("classify_replay_hit");
  ContentBlock b = block("IDLE --(start)--> REQ");
  util::write_file(dir / (cache_key(build_classification_prompt(b), "m") + ".txt"),
                   "Modality: TEXT\nSemantic category: Architecture");
  LlmClient client(ReplayMode{dir, "m"});
  auto r = classify_block(b, &client);
  EXPECT_EQ(r.modality, Modality::Text);
  EXPECT_EQ(r.category.kind(), SemanticCategory::Kind::Architecture);
}
