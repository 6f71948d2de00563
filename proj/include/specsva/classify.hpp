// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "specsva/llm_client.hpp"
#include "specsva/spec_ir.hpp"

namespace specsva {

struct ClassificationResult {
  Modality modality = Modality::Text;
  SemanticCategory category;
  std::string rationale;
  friend bool operator==(const ClassificationResult&, const ClassificationResult&) = default;
};

struct ClassifyOptions {
  /// Worked example appended to the system prompt. Empty disables it.
  std::string example_input =
      "When `start` is sampled high, `busy` goes high on the next clock edge and stays high until `done`.";
  std::string example_output = "Modality: TEXT\nSemantic category: Timing Behavior";
};

ChatRequest build_classification_prompt(const ContentBlock& block, const ClassifyOptions& opts = {});

/// Uses the last `Modality:` and `Semantic category:` lines. Throws
/// UnparseableResponse.
ClassificationResult parse_classification(std::string_view response);
/// Inverse of parse_classification: optional rationale, then the two lines.
std::string render_classification(const ClassificationResult& r);

/// Deterministic keyword/shape heuristics; total.
ClassificationResult classify_rules(const ContentBlock& block);

/// Rules when `client` is null or a mock; otherwise the LLM, falling back to
/// the rules after two unparseable responses.
ClassificationResult classify_block(const ContentBlock& block, LlmClient* client, const ClassifyOptions& opts = {});

/// Classifies every block in place.
void classify_document(SpecDocument& doc, LlmClient* client, const ClassifyOptions& opts = {});

}  // namespace specsva
