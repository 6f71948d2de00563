// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// End-to-end orchestration: ingest -> classify -> analyze -> merge ->
// generate -> mutate -> check -> evaluate, with every stage persisting its
// artifact under a fixed output layout so later stages can be re-run alone.
//
//   <output>/blocks/     spec.jsonl, classified.jsonl
//   <output>/records/    records.jsonl
//   <output>/signals/    signals.json, <signal>.txt
//   <output>/assertions/ iter<N>.json, iter<N>.sva, final.sva
//   <output>/mutants/    manifest.json, m###.v
//   <output>/matrix/     iter<N>.json, golden.json, witnesses/
//   <output>/report/     report.json, report.md, labels_template.json

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "specsva/checker.hpp"
#include "specsva/llm_client.hpp"

namespace specsva {

struct PipelineConfig {
  std::string design;
  std::filesystem::path spec;
  bool spec_plaintext = false;
  std::filesystem::path rtl;
  std::filesystem::path corpus;  // empty: no retrieval
  std::filesystem::path output;
  std::filesystem::path labels;  // optional
  std::string method = "specsva";

  std::string llm_mode = "mock";  // mock | replay | live
  std::filesystem::path fixtures;
  std::filesystem::path cache;
  std::string endpoint;
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  double requests_per_minute = 60.0;

  CheckConfig check;
  std::size_t mutant_budget = 300;
  std::uint64_t mutant_seed = 1;
  int max_iter = 3;

  bool rag = true;
  bool cot = true;
  std::size_t top_k = 3;
  std::string clock = "clk";
};

/// Relative paths resolve against `base_dir`. Unknown keys are rejected.
/// Throws ConfigError.
PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& file);

struct ConfigOverrides {
  std::optional<std::filesystem::path> output;
  std::optional<int> max_iter;
  bool offline = false;  // live becomes replay; mock/replay unchanged
  bool no_rag = false;
  bool no_cot = false;
};

void apply_overrides(PipelineConfig& cfg, const ConfigOverrides& o);

/// Referenced inputs exist, max_iter >= 1, mode is known. Throws ConfigError.
void validate_config(const PipelineConfig& cfg);

/// "specsva", "specsva (no RAG, 1 iter)", ...
std::string method_label(const PipelineConfig& cfg);

std::unique_ptr<LlmClient> make_client(const PipelineConfig& cfg);

enum class Stage { Ingest, Classify, Analyze, Merge, Generate, Mutate, Check, Evaluate };

inline constexpr Stage kAllStages[] = {Stage::Ingest,   Stage::Classify, Stage::Analyze, Stage::Merge,
                                       Stage::Generate, Stage::Mutate,   Stage::Check,   Stage::Evaluate};

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view text);

class Pipeline {
 public:
  /// Validates the config. Throws ConfigError.
  explicit Pipeline(PipelineConfig cfg);
  ~Pipeline();

  /// Failures other than ConfigError are rethrown as StageError tagged with
  /// the stage name; artifacts of earlier stages are left in place.
  void run_stage(Stage s);
  /// Runs `from` and every later stage.
  void run(Stage from = Stage::Ingest);

  const PipelineConfig& config() const { return cfg_; }
  std::filesystem::path dir(std::string_view sub) const { return cfg_.output / sub; }

 private:
  void ingest();
  void classify();
  void analyze();
  void merge();
  void generate();
  void mutate();
  void check();
  void evaluate();

  LlmClient* client();

  PipelineConfig cfg_;
  std::unique_ptr<LlmClient> client_;
};

}  // namespace specsva
