// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <fmt/core.h>
#include <gtest/gtest.h>

#include "specsva/svagen.hpp"
#include "test_util.hpp"

using namespace specsva;
using testing_util::kind_of;

namespace {

const char* kReadValidResponse =
    "Step 1:\nIf (read_req && !arbiter_grant), then read_valid must become high within 2-4 cycles and stay high "
    "for >=2 cycles.\nStep 2:Pattern: Implication\nStep 3:Temporal: ##[2:4] read_valid[*2]\nStep 4:assert property "
    "(@(posedge clk)(read_req && !arbiter_grant) |-> ##[2:4]read_valid[*2]);";

GenerationRequest read_valid_request() {
  GenerationRequest req;
  req.signal = "read_valid";
  req.triplet = {"read_req is high && arbiter_grant is low", "read_valid must be high",
                 "between 2 and 4 cycles, and hold for >=2 cycles"};
  return req;
}

std::string response_with(const std::string& step4) {
  return "Step 1: x\nStep 2: Pattern: Implication\nStep 3: Temporal: ##1 b\nStep 4: " + step4;
}

}  // namespace

TEST(GenPrompt, EmbedsTriplet) {
  auto req = build_generation_prompt(read_valid_request());
  EXPECT_NE(req.user.find("\"precondition\": \"read_req is high && arbiter_grant is low\""), std::string::npos);
  EXPECT_NE(req.user.find("\"timing\": \"between 2 and 4 cycles, and hold for >=2 cycles\""), std::string::npos);
  EXPECT_NE(req.user.find("Reason step-by-step"), std::string::npos);
  for (const char* s : {"Step 1", "Step 2", "Step 3", "Step 4"}) EXPECT_NE(req.user.find(s), std::string::npos);
  EXPECT_EQ(req.user.find("FEEDBACK:"), std::string::npos);
  EXPECT_EQ(req.user.find("REFERENCES:"), std::string::npos);
}

TEST(GenPrompt, FeedbackOnlyWithCues) {
  auto r0 = read_valid_request();
  auto r1 = r0;
  r1.iteration = 1;
  r1.mutation_points = {"read_valid never asserted"};
  auto p0 = build_generation_prompt(r0).user;
  auto p1 = build_generation_prompt(r1).user;
  EXPECT_NE(p1.find("FEEDBACK:"), std::string::npos);
  EXPECT_NE(p1.find("read_valid never asserted"), std::string::npos);
  // Every line of the initial prompt's instructions survives in the feedback prompt.
  auto head = p0.substr(0, p0.find("INPUT:"));
  for (const auto& line : util::split_lines(head)) EXPECT_NE(p1.find(line), std::string::npos) << line;
}

TEST(GenPrompt, References) {
  auto req = read_valid_request();
  req.retrieved = {{"implication.md#0", "ranged delays", 1.0}};
  auto p = build_generation_prompt(req).user;
  EXPECT_NE(p.find("REFERENCES:"), std::string::npos);
  EXPECT_NE(p.find("[implication.md#0]"), std::string::npos);
}

TEST(GenRequest, NonGenerable) {
  SignalSpec s;
  s.name = "x";
  EXPECT_EQ(kind_of([&] { make_request(s); }), ErrorKind::NonGenerableSignal);
  s.invariant = "x == (a && b)";
  s.roles = {TemporalRole::InvariantHolder};
  EXPECT_NO_THROW(make_request(s));
}

TEST(GenParse, ReadValidOutput) {
  auto r = parse_generation_response(kReadValidResponse);
  EXPECT_EQ(r.pattern, AssertionPattern::Implication);
  EXPECT_EQ(r.steps.temporal, "##[2:4] read_valid[*2]");
  EXPECT_EQ(r.ast, parse_sva("assert property (@(posedge clk) (read_req && !arbiter_grant) |-> ##[2:4] read_valid[*2]);"));
}

TEST(GenParse, MissingStep3) {
  EXPECT_EQ(kind_of([] {
              parse_generation_response("Step 1: x\nStep 2: Pattern: Implication\nStep 4: assert property (@(posedge clk) a);");
            }),
            ErrorKind::UnparseableResponse);
}

TEST(GenParse, BadStep4) {
  EXPECT_EQ(kind_of([] { parse_generation_response(response_with("assert property (@(posedge clk) (a |-> b);")); }),
            ErrorKind::UnparseableResponse);
}

TEST(Generate, RepairRetry) {
  auto req = read_valid_request();
  LlmClient client(MockMode{{},
                            {{"generate", {"could not be used"}, kReadValidResponse},
                             {"generate", {}, response_with("assert property (@(posedge clk) (a |-> b);")}}});
  auto out = generate_assertion(req, &client, nullptr);
  ASSERT_TRUE(out.result);
  EXPECT_TRUE(out.result->repaired);
  EXPECT_EQ(out.result->signal, "read_valid");
}

TEST(Generate, DiscardAfterSecondFailure) {
  LlmClient client(MockMode{{}, {{"generate", {}, "no steps at all"}}});
  auto out = generate_assertion(read_valid_request(), &client, nullptr);
  EXPECT_FALSE(out.result);
  EXPECT_FALSE(out.error.empty());
}

TEST(Generate, MockMissUsesTemplate) {
  LlmClient client(MockMode{});
  auto out = generate_assertion(read_valid_request(), &client, nullptr);
  ASSERT_TRUE(out.result);
  EXPECT_TRUE(out.result->deterministic);
}

TEST(Generate, OfflineDeterminism) {
  auto index = RetrievalIndex::build(testing_util::source_dir() / "corpus");
  LlmClient client(MockMode{{}, {{"generate", {}, kReadValidResponse}}});
  auto a = generate_assertion(read_valid_request(), &client, &index);
  auto b = generate_assertion(read_valid_request(), &client, &index);
  ASSERT_TRUE(a.result && b.result);
  EXPECT_EQ(provenance_json("x", *a.result).dump(), provenance_json("x", *b.result).dump());
  EXPECT_FALSE(a.result->passage_ids.empty());
}

TEST(Template, ReadValid) {
  auto r = synthesize_deterministic(read_valid_request());
  EXPECT_EQ(r.pattern, AssertionPattern::Implication);
  EXPECT_EQ(r.steps.temporal, "##[2:4] read_valid[*2]");
  EXPECT_EQ(normalize_whitespace(render_sva(r.ast)),
            normalize_whitespace("assert property (@(posedge clk) (read_req && !arbiter_grant) |-> ##[2:4] read_valid[*2]);"));
  EXPECT_TRUE(r.deterministic);
}

TEST(SelectPattern, Rules) {
  IntentTriplet t{"read_req && !arbiter_grant", "read_valid == 1", "##[2:4] read_valid[*2]"};
  EXPECT_EQ(select_pattern(t, {TemporalRole::Stabilizer}), AssertionPattern::Implication);
  EXPECT_EQ(select_pattern({"", "data", ""}, {TemporalRole::Stabilizer}), AssertionPattern::Stability);
  EXPECT_EQ(select_pattern({"", "parity == ^data", ""}, {}), AssertionPattern::Invariant);
}

TEST(BindTemporal, Forms) {
  EXPECT_EQ(bind_temporal("between 2 and 4 cycles, and hold for >=2 cycles", "read_valid"), "##[2:4] read_valid[*2]");
  EXPECT_EQ(bind_temporal("within 1 cycle", "ack"), "##[0:1] ack");
  EXPECT_EQ(bind_temporal("##[1:2] ack_out[*2]", "ack_out"), "##[1:2] ack_out[*2]");
  EXPECT_EQ(kind_of([] { bind_temporal("eventually someday", "x"); }), ErrorKind::UnboundTiming);
}

TEST(BindTemporal, OutputParses) {
  std::mt19937 rng(6);
  std::uniform_int_distribution<int> n(0, 6), form(0, 3);
  for (int i = 0; i < 300; ++i) {
    int a = n(rng), b = a + n(rng), h = 1 + n(rng);
    std::string text;
    switch (form(rng)) {
      case 0: text = fmt::format("between {} and {} cycles", a, b); break;
      case 1: text = fmt::format("between {} and {} cycles, and hold for >={} cycles", a, b, h); break;
      case 2: text = fmt::format("within {} cycles", b); break;
      default: text = fmt::format("##[{}:{}] s[*{}]", a, b, h); break;
    }
    auto frag = bind_temporal(text, "s");
    EXPECT_NO_THROW(parse_sequence_text(frag)) << text << " -> " << frag;
  }
}

TEST(NormalizeCondition, Prose) {
  EXPECT_EQ(normalize_condition("read_req is high && arbiter_grant is low"), "read_req && !arbiter_grant");
  EXPECT_EQ(normalize_condition("state == READ && data_valid"), "state == READ && data_valid");
  EXPECT_EQ(kind_of([] { normalize_condition("when it feels right"); }), ErrorKind::SyntaxError);
}

TEST(Retrieval, HandCheckedRanking) {
  auto dir = testing_util::scratch_dir("corpus");
  util::write_file(dir / "a_colors.md", "Red green blue are colors of paint.\n");
  util::write_file(dir / "b_impl.md", "An implication `a |-> ##[1:3] b` adds a delay range to the response.\n");
  util::write_file(dir / "c_delay.md", "A delay waits some cycles.\n");
  auto index = RetrievalIndex::build(dir);
  auto top = index.retrieve("implication delay range", 3);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].id.substr(0, 9), "b_impl.md");
  EXPECT_EQ(top[1].id.substr(0, 10), "c_delay.md");
  EXPECT_GT(top[0].score, top[1].score);
  EXPECT_TRUE(index.retrieve("implication", 0).empty());
}

TEST(Retrieval, EmptyCorpus) {
  EXPECT_EQ(kind_of([] { RetrievalIndex::build("/nonexistent/corpus"); }), ErrorKind::EmptyCorpus);
  auto dir = testing_util::scratch_dir("corpus_empty");
  EXPECT_EQ(kind_of([&] { RetrievalIndex::build(dir); }), ErrorKind::EmptyCorpus);
}

TEST(Retrieval, ChunksAreBounded) {
  auto dir = testing_util::scratch_dir("corpus_long");
  std::string text;
  for (int i = 0; i < 1000; ++i) text += fmt::format("word{} ", i % 37);
  util::write_file(dir / "long.md", text);
  auto index = RetrievalIndex::build(dir);
  EXPECT_EQ(index.size(), 3u);
  for (const auto& p : index.retrieve("word3", 5)) EXPECT_LE(RetrievalIndex::tokenize(p.text).size(), 400u);
}
