// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line driver. Exit codes: 0 success, 1 stage failure, 2 config or
// usage error.

#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/pipeline.hpp"
#include "specsva/rtl.hpp"
#include "specsva/sva.hpp"
#include "specsva/util.hpp"

namespace {

using namespace specsva;

struct Common {
  std::string config;
  std::string output;
  int max_iter = 0;
  bool offline = false;
  bool no_rag = false;
  bool no_cot = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config, "pipeline config (JSON)")->required();
  sub->add_option("-o,--output", c.output, "output directory (overrides the config)");
  sub->add_option("--max-iter", c.max_iter, "refinement iterations (overrides the config)")->check(CLI::PositiveNumber);
  sub->add_flag("--offline", c.offline, "never contact a live endpoint (live configs replay from the cache)");
  sub->add_flag("--no-rag", c.no_rag, "disable retrieval of reference passages");
  sub->add_flag("--no-cot", c.no_cot, "template synthesis only, no LLM generation");
}

PipelineConfig make_config(const Common& c) {
  auto cfg = load_config(c.config);
  ConfigOverrides o;
  if (!c.output.empty()) o.output = c.output;
  if (c.max_iter > 0) o.max_iter = c.max_iter;
  o.offline = c.offline;
  o.no_rag = c.no_rag;
  o.no_cot = c.no_cot;
  apply_overrides(cfg, o);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Specification-driven assertion generation with mutation-guided refinement"};
  app.require_subcommand(1);

  Common common;
  bool plaintext = false;
  std::string from = "ingest";
  std::string external_dir;
  std::size_t external_depth = 20;

  std::vector<std::pair<CLI::App*, Stage>> stage_cmds;
  auto stage_cmd = [&](Stage s, const char* help) {
    auto* sub = app.add_subcommand(std::string(to_string(s)), help);
    add_common(sub, common);
    stage_cmds.emplace_back(sub, s);
    return sub;
  };
  stage_cmd(Stage::Ingest, "load the spec into blocks/spec.jsonl")
      ->add_flag("--plaintext", plaintext, "treat the spec as plain text and split it into blocks");
  stage_cmd(Stage::Classify, "assign modality and semantic category to each block");
  stage_cmd(Stage::Analyze, "run the modality analyzers into records/");
  stage_cmd(Stage::Merge, "merge records into per-signal specs under signals/");
  stage_cmd(Stage::Generate, "synthesize the initial assertions under assertions/");
  stage_cmd(Stage::Mutate, "generate RTL mutants under mutants/");
  auto* check = stage_cmd(Stage::Check, "golden check and detection matrix for the initial assertions");
  check->add_option("--emit-external", external_dir, "also write one formal job per assertion into this directory");
  check->add_option("--external-depth", external_depth, "bound for emitted formal jobs");
  stage_cmd(Stage::Evaluate, "refinement loop and report/");
  auto* run = app.add_subcommand("run", "run every stage in order");
  add_common(run, common);
  run->add_option("--from", from, "first stage to run; earlier artifacts are reused")
      ->check(CLI::IsMember({"ingest", "classify", "analyze", "merge", "generate", "mutate", "check", "evaluate"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto cfg = make_config(common);
    if (plaintext) cfg.spec_plaintext = true;
    Pipeline pipeline(cfg);
    if (run->parsed()) {
      pipeline.run(*parse_stage(from));
    } else {
      for (auto& [sub, stage] : stage_cmds) {
        if (!sub->parsed()) continue;
        pipeline.run_stage(stage);
      }
    }
    if (check->parsed() && !external_dir.empty()) {
      auto rtl = parse_rtl(util::read_file(cfg.rtl));
      auto entries = parse_assertion_file(util::read_file(pipeline.dir("assertions") / "iter0.sva"));
      for (const auto& e : entries)
        if (e.ast) emit_external_job(*e.ast, rtl, std::filesystem::path(external_dir) / e.id, external_depth);
    }
    if (run->parsed() || app.got_subcommand("evaluate"))
      std::cout << util::read_file(pipeline.dir("report") / "report.md");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) {
      fmt::print(stderr, "{}\n", e.what());
      return 2;
    }
    if (e.kind() == ErrorKind::StageError) {
      fmt::print(stderr, "{}\n", e.what());
      return 1;
    }
    fmt::print(stderr, "{}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
