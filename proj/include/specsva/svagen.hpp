// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Four-step assertion synthesis (decomposition, pattern, temporal binding,
// syntax) from a SignalSpec, via the LLM or a deterministic template path,
// with lexical retrieval over a local reference corpus.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specsva/llm_client.hpp"
#include "specsva/merge.hpp"
#include "specsva/sva.hpp"

namespace specsva {

enum class AssertionPattern { Implication, Stability, Invariant };

std::string_view to_string(AssertionPattern p);
std::optional<AssertionPattern> parse_pattern(std::string_view text);

// Retrieval -----------------------------------------------------------------

struct Passage {
  std::string id;  // "<relative path>#<chunk>"
  std::string text;
  double score = 0;
};

/// BM25 over chunks of at most 400 tokens from the *.md / *.txt files of a
/// directory tree.
class RetrievalIndex {
 public:
  /// Throws EmptyCorpus when the directory is missing or holds no text.
  static RetrievalIndex build(const std::filesystem::path& dir);

  /// Top `k` passages with a positive score; ties keep corpus order.
  std::vector<Passage> retrieve(std::string_view query, std::size_t k) const;
  std::size_t size() const { return chunks_.size(); }

  static std::vector<std::string> tokenize(std::string_view text);

 private:
  struct Chunk {
    std::string id;
    std::string text;
    std::vector<std::string> tokens;
  };
  std::vector<Chunk> chunks_;
  double avg_len_ = 0;
};

std::vector<Passage> retrieve(std::string_view query, const std::filesystem::path& corpus_dir, std::size_t k);

// Deterministic steps -------------------------------------------------------

/// Precedence Implication > Stability > Invariant.
AssertionPattern select_pattern(const IntentTriplet& triplet, const std::vector<TemporalRole>& roles);

/// "between A and B cycles[, and hold for >=H cycles]", "within N cycles",
/// "after N cycles", ... or an SVA fragment. Throws UnboundTiming.
std::string bind_temporal(std::string_view timing, std::string_view signal);

/// "a is high && b is low" -> "a && !b". Throws SyntaxError when the result
/// is not an expression.
std::string normalize_condition(std::string_view text);

// Generation ----------------------------------------------------------------

struct GenerationRequest {
  std::string signal;
  IntentTriplet triplet;
  std::vector<TemporalRole> roles;
  std::vector<std::string> mutation_points;
  std::vector<Passage> retrieved;
  int iteration = 0;
};

/// Throws NonGenerableSignal.
GenerationRequest make_request(const SignalSpec& spec, int iteration = 0,
                               std::vector<std::string> mutation_points = {});

struct GenerationSteps {
  std::string decomposition;
  std::string pattern;
  std::string temporal;
  std::string final_text;
  friend bool operator==(const GenerationSteps&, const GenerationSteps&) = default;
};

struct GenerationResult {
  std::string signal;
  GenerationSteps steps;
  AssertionPattern pattern = AssertionPattern::Implication;
  SvaAst ast;
  bool deterministic = false;
  bool repaired = false;
  int iteration = 0;
  std::vector<std::string> passage_ids;
};

ChatRequest build_generation_prompt(const GenerationRequest& req);
/// Extracts Steps 1-4; Step 4 must parse. Throws UnparseableResponse.
GenerationResult parse_generation_response(std::string_view text);
/// Template path: select_pattern, bind_temporal, assembly.
GenerationResult synthesize_deterministic(const GenerationRequest& req, const std::string& clock = "clk");

struct GenerateOptions {
  bool chain_of_thought = true;  // false: deterministic path only
  std::size_t top_k = 3;         // 0 disables retrieval
  std::string clock = "clk";
};

struct GenerationOutcome {
  std::optional<GenerationResult> result;
  std::string error;  // set when the response was discarded
  std::string raw;    // last raw response
};

/// LLM path with one repair retry; a mock client without a matching
/// fixture falls back to the template path.
GenerationOutcome generate_assertion(GenerationRequest req, LlmClient* client, const RetrievalIndex* index,
                                     const GenerateOptions& opts = {});

std::string retrieval_query(const GenerationRequest& req);

nlohmann::json provenance_json(const std::string& id, const GenerationResult& r);

}  // namespace specsva
