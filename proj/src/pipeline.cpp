// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "specsva/analyzers.hpp"
#include "specsva/classify.hpp"
#include "specsva/error.hpp"
#include "specsva/eval_loop.hpp"
#include "specsva/merge.hpp"
#include "specsva/mutate.hpp"
#include "specsva/rtl.hpp"
#include "specsva/spec_ir.hpp"
#include "specsva/svagen.hpp"
#include "specsva/util.hpp"

namespace specsva {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) config_error(fmt::format("{} must be an object", where));
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      config_error(fmt::format("unknown key '{}' in {}", k, where));
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, std::string_view where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(fmt::format("{}.{} has the wrong type", where, key));
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

const char* kAssertionsSchema = "specsva/assertions";
const char* kGoldenSchema = "specsva/golden";

fs::path iter_file(const fs::path& dir, int it, std::string_view ext) {
  return dir / fmt::format("iter{}.{}", it, ext);
}

// One stored generation attempt.
struct StoredAssertion {
  std::string id;
  std::string signal;
  std::string text;
  json provenance;
};

struct StoredFailure {
  std::string signal;
  std::string error;
};

struct IterationFile {
  int iteration = 0;
  std::vector<StoredAssertion> assertions;
  std::vector<StoredFailure> failures;
};

std::string write_iteration(const std::string& design, const IterationFile& f) {
  ordered_json j;
  j["schema"] = kAssertionsSchema;
  j["version"] = 1;
  j["design"] = design;
  j["iteration"] = f.iteration;
  j["assertions"] = ordered_json::array();
  for (const auto& a : f.assertions) {
    ordered_json e;
    e["id"] = a.id;
    e["signal"] = a.signal;
    e["text"] = a.text;
    e["provenance"] = a.provenance;
    j["assertions"].push_back(e);
  }
  j["failures"] = ordered_json::array();
  for (const auto& x : f.failures) j["failures"].push_back({{"signal", x.signal}, {"error", x.error}});
  return j.dump(2) + "\n";
}

IterationFile read_iteration(const fs::path& path) {
  json j;
  try {
    j = json::parse(util::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SyntaxError, fmt::format("{}: {}", path.string(), e.what()));
  }
  if (j.value("schema", "") != kAssertionsSchema)
    throw Error(ErrorKind::SyntaxError, path.string() + ": not an assertions artifact");
  IterationFile f;
  f.iteration = j.value("iteration", 0);
  for (const auto& e : j.at("assertions"))
    f.assertions.push_back({e.at("id"), e.at("signal"), e.at("text"), e.value("provenance", json::object())});
  for (const auto& e : j.at("failures")) f.failures.push_back({e.at("signal"), e.at("error")});
  return f;
}

std::string write_sva(const IterationFile& f) {
  std::vector<AssertionEntry> entries;
  for (const auto& a : f.assertions) entries.push_back({a.id, a.id + ": " + a.text, std::nullopt, {}});
  return write_assertion_file(entries, fmt::format("iteration {}", f.iteration));
}

NamedAssertion to_named(const StoredAssertion& a) {
  NamedAssertion n{a.id, parse_sva(a.text)};
  n.ast.label.clear();
  return n;
}

int span_of(const SvaAst& a) {
  return (a.antecedent ? a.antecedent->max_span() : 0) + a.consequent.max_span();
}

/// Configured check settings, lengthened so the longest window fits twice
/// over its own start.
CheckConfig check_config_for(const PipelineConfig& cfg, const std::vector<NamedAssertion>& as) {
  CheckConfig c = cfg.check;
  for (const auto& a : as) c.trace_length = std::max(c.trace_length, static_cast<std::size_t>(span_of(a.ast)) + 2);
  return c;
}

using GoldenMap = std::map<std::string, std::string>;  // id -> holds | fails | vacuous | unknown_signal

std::string golden_kind(const SvaAst& ast, const RtlModule& rtl, const CheckConfig& cfg) {
  try {
    return to_string(check_golden(ast, rtl, cfg).kind);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UnknownSignal) return "unknown_signal";
    throw;
  }
}

bool golden_fails(const std::string& kind) { return kind == "fails" || kind == "unknown_signal"; }

std::string write_golden(const std::string& design, const GoldenMap& g) {
  ordered_json j;
  j["schema"] = kGoldenSchema;
  j["version"] = 1;
  j["design"] = design;
  j["results"] = ordered_json::object();
  for (const auto& [id, kind] : g) j["results"][id] = kind;
  return j.dump(2) + "\n";
}

GoldenMap read_golden(const fs::path& path) {
  GoldenMap g;
  if (!fs::exists(path)) return g;
  auto j = json::parse(util::read_file(path));
  if (j.value("schema", "") != kGoldenSchema) throw Error(ErrorKind::SyntaxError, path.string() + ": not a golden artifact");
  for (const auto& [id, kind] : j.at("results").items()) g[id] = kind.get<std::string>();
  return g;
}

RtlModule load_rtl(const fs::path& p) { return parse_rtl(util::read_file(p)); }

}  // namespace

// Config ---------------------------------------------------------------------

PipelineConfig parse_config(const json& j, const fs::path& base_dir) {
  check_keys(j, "config",
             {"design", "spec", "spec_format", "rtl", "corpus", "output", "labels", "method", "llm", "check",
              "mutation", "refinement", "generation"});
  PipelineConfig c;
  std::string spec, rtl, corpus, output, labels, format = "blockstream";
  read(j, "design", c.design, "config");
  read(j, "spec", spec, "config");
  read(j, "spec_format", format, "config");
  read(j, "rtl", rtl, "config");
  read(j, "corpus", corpus, "config");
  read(j, "output", output, "config");
  read(j, "labels", labels, "config");
  read(j, "method", c.method, "config");
  if (format != "blockstream" && format != "plaintext")
    config_error("spec_format must be \"blockstream\" or \"plaintext\"");
  c.spec_plaintext = format == "plaintext";
  c.spec = resolve(base_dir, spec);
  c.rtl = resolve(base_dir, rtl);
  c.corpus = resolve(base_dir, corpus);
  c.output = resolve(base_dir, output.empty() ? "out" : output);
  c.labels = resolve(base_dir, labels);

  if (j.contains("llm")) {
    const auto& l = j["llm"];
    check_keys(l, "llm", {"mode", "fixtures", "cache", "endpoint", "model", "api_key_env", "requests_per_minute"});
    std::string fixtures, cache;
    read(l, "mode", c.llm_mode, "llm");
    read(l, "fixtures", fixtures, "llm");
    read(l, "cache", cache, "llm");
    read(l, "endpoint", c.endpoint, "llm");
    read(l, "model", c.model, "llm");
    read(l, "api_key_env", c.api_key_env, "llm");
    read(l, "requests_per_minute", c.requests_per_minute, "llm");
    c.fixtures = resolve(base_dir, fixtures);
    c.cache = resolve(base_dir, cache);
  }
  if (j.contains("check")) {
    const auto& k = j["check"];
    check_keys(k, "check",
               {"mode", "trace_length", "max_stimuli", "seed", "exhaustive_cap", "threads", "reset",
                "reset_active_low", "reset_cycles"});
    std::string mode = "exhaustive";
    read(k, "mode", mode, "check");
    if (mode == "exhaustive") {
      c.check.mode = CheckMode::Exhaustive;
    } else if (mode == "random") {
      c.check.mode = CheckMode::Random;
    } else {
      config_error("check.mode must be \"exhaustive\" or \"random\"");
    }
    read(k, "trace_length", c.check.trace_length, "check");
    read(k, "max_stimuli", c.check.max_stimuli, "check");
    read(k, "seed", c.check.seed, "check");
    read(k, "exhaustive_cap", c.check.exhaustive_cap, "check");
    read(k, "threads", c.check.threads, "check");
    read(k, "reset", c.check.reset, "check");
    read(k, "reset_active_low", c.check.reset_active_low, "check");
    read(k, "reset_cycles", c.check.reset_cycles, "check");
  }
  if (j.contains("mutation")) {
    check_keys(j["mutation"], "mutation", {"budget", "seed"});
    read(j["mutation"], "budget", c.mutant_budget, "mutation");
    read(j["mutation"], "seed", c.mutant_seed, "mutation");
  }
  if (j.contains("refinement")) {
    check_keys(j["refinement"], "refinement", {"max_iter"});
    read(j["refinement"], "max_iter", c.max_iter, "refinement");
  }
  if (j.contains("generation")) {
    check_keys(j["generation"], "generation", {"rag", "cot", "top_k", "clock"});
    read(j["generation"], "rag", c.rag, "generation");
    read(j["generation"], "cot", c.cot, "generation");
    read(j["generation"], "top_k", c.top_k, "generation");
    read(j["generation"], "clock", c.clock, "generation");
  }
  return c;
}

PipelineConfig load_config(const fs::path& file) {
  std::string text;
  try {
    text = util::read_file(file);
  } catch (const Error&) {
    config_error(fmt::format("cannot read config {}", file.string()));
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(fmt::format("{}: {}", file.string(), e.what()));
  }
  return parse_config(j, fs::absolute(file).parent_path());
}

void apply_overrides(PipelineConfig& cfg, const ConfigOverrides& o) {
  if (o.output) cfg.output = fs::absolute(*o.output);
  if (o.max_iter) cfg.max_iter = *o.max_iter;
  if (o.no_rag) cfg.rag = false;
  if (o.no_cot) cfg.cot = false;
  if (o.offline && cfg.llm_mode == "live") {
    if (cfg.cache.empty()) config_error("--offline with a live client needs llm.cache for replay");
    cfg.llm_mode = "replay";
  }
}

void validate_config(const PipelineConfig& cfg) {
  if (cfg.design.empty()) config_error("design is required");
  auto need = [](const fs::path& p, const char* what) {
    if (p.empty()) config_error(fmt::format("{} is required", what));
    if (!fs::exists(p)) config_error(fmt::format("{} not found: {}", what, p.string()));
  };
  need(cfg.spec, "spec");
  need(cfg.rtl, "rtl");
  if (!cfg.corpus.empty() && !fs::is_directory(cfg.corpus))
    config_error(fmt::format("corpus not found: {}", cfg.corpus.string()));
  if (!cfg.labels.empty() && !fs::exists(cfg.labels))
    config_error(fmt::format("labels not found: {}", cfg.labels.string()));
  if (cfg.max_iter < 1) config_error("refinement.max_iter must be at least 1");
  if (cfg.mutant_budget < 1) config_error("mutation.budget must be at least 1");
  if (cfg.llm_mode == "mock") {
    if (!cfg.fixtures.empty() && !fs::is_directory(cfg.fixtures))
      config_error(fmt::format("llm.fixtures not found: {}", cfg.fixtures.string()));
  } else if (cfg.llm_mode == "replay") {
    if (cfg.cache.empty()) config_error("llm.cache is required in replay mode");
  } else if (cfg.llm_mode == "live") {
    if (cfg.endpoint.empty() || cfg.model.empty()) config_error("llm.endpoint and llm.model are required in live mode");
  } else {
    config_error("llm.mode must be mock, replay or live");
  }
  validate(cfg.check);
}

std::string method_label(const PipelineConfig& cfg) {
  std::vector<std::string> tags;
  if (!cfg.rag) tags.push_back("no RAG");
  if (!cfg.cot) tags.push_back("no CoT");
  if (cfg.max_iter == 1) tags.push_back("1 iter");
  if (tags.empty()) return cfg.method;
  return fmt::format("{} ({})", cfg.method, util::join(tags, ", "));
}

std::unique_ptr<LlmClient> make_client(const PipelineConfig& cfg) {
  if (cfg.llm_mode == "live") {
    LiveMode m;
    m.endpoint = cfg.endpoint;
    m.model = cfg.model;
    m.api_key_env = cfg.api_key_env;
    m.cache_dir = cfg.cache;
    m.requests_per_minute = cfg.requests_per_minute;
    return std::make_unique<LlmClient>(m);
  }
  if (cfg.llm_mode == "replay") return std::make_unique<LlmClient>(ReplayMode{cfg.cache, cfg.model});
  return std::make_unique<LlmClient>(MockMode{cfg.fixtures, {}});
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Classify: return "classify";
    case Stage::Analyze: return "analyze";
    case Stage::Merge: return "merge";
    case Stage::Generate: return "generate";
    case Stage::Mutate: return "mutate";
    case Stage::Check: return "check";
    case Stage::Evaluate: return "evaluate";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view text) {
  for (auto s : kAllStages)
    if (to_string(s) == text) return s;
  return std::nullopt;
}

// Pipeline -------------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) { validate_config(cfg_); }

Pipeline::~Pipeline() = default;

LlmClient* Pipeline::client() {
  if (!client_) client_ = make_client(cfg_);
  return client_.get();
}

void Pipeline::run_stage(Stage s) {
  try {
    switch (s) {
      case Stage::Ingest: ingest(); break;
      case Stage::Classify: classify(); break;
      case Stage::Analyze: analyze(); break;
      case Stage::Merge: merge(); break;
      case Stage::Generate: generate(); break;
      case Stage::Mutate: mutate(); break;
      case Stage::Check: check(); break;
      case Stage::Evaluate: evaluate(); break;
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::StageError) throw;
    throw Error(ErrorKind::StageError, fmt::format("{}: {}", to_string(s), e.what()),
                std::nullopt, std::string(to_string(s)));
  } catch (const std::exception& e) {
    throw Error(ErrorKind::StageError, fmt::format("{}: {}", to_string(s), e.what()), std::nullopt,
                std::string(to_string(s)));
  }
}

void Pipeline::run(Stage from) {
  for (auto s : kAllStages)
    if (static_cast<int>(s) >= static_cast<int>(from)) run_stage(s);
}

void Pipeline::ingest() {
  SpecDocument doc;
  if (cfg_.spec_plaintext) {
    doc = split_plaintext(util::read_file(cfg_.spec), cfg_.design);
  } else {
    doc = load_spec(cfg_.spec);
    if (doc.design_name.empty()) doc.design_name = cfg_.design;
  }
  validate_document(doc);
  store_spec(doc, dir("blocks") / "spec.jsonl");
}

void Pipeline::classify() {
  auto doc = load_spec(dir("blocks") / "spec.jsonl");
  classify_document(doc, client());
  store_spec(doc, dir("blocks") / "classified.jsonl");
}

void Pipeline::analyze() {
  auto doc = load_spec(dir("blocks") / "classified.jsonl");
  auto records = analyze_document(doc, client());
  util::write_file(dir("records") / "records.jsonl", write_records(doc.design_name, records));
}

void Pipeline::merge() {
  auto [design, records] = parse_records(util::read_file(dir("records") / "records.jsonl"));
  auto signals = merge_all(records);
  util::write_file(dir("signals") / "signals.json", write_signals(design, signals));
  for (const auto& s : signals) util::write_file(dir("signals") / (s.name + ".txt"), render_signal_spec(s));
}

namespace {

struct Generator {
  const PipelineConfig& cfg;
  LlmClient* client;
  std::optional<RetrievalIndex> index;
  std::vector<SignalSpec> signals;

  Generator(const PipelineConfig& c, LlmClient* cl, const fs::path& signals_file) : cfg(c), client(cl) {
    signals = parse_signals(util::read_file(signals_file)).second;
    if (cfg.rag && !cfg.corpus.empty()) index = RetrievalIndex::build(cfg.corpus);
  }

  /// One attempt per target signal; every generable signal when `targets`
  /// is empty.
  IterationFile run(int iteration, const std::vector<std::string>& cues, const std::set<std::string>& targets) {
    IterationFile f;
    f.iteration = iteration;
    GenerateOptions opts;
    opts.chain_of_thought = cfg.cot;
    opts.top_k = cfg.rag ? cfg.top_k : 0;
    opts.clock = cfg.clock;
    for (const auto& s : signals) {
      if (!s.generable()) continue;
      if (!targets.empty() && !targets.count(s.name)) continue;
      auto req = make_request(s, iteration, cues);
      auto out = generate_assertion(req, client, index ? &*index : nullptr, opts);
      if (!out.result) {
        f.failures.push_back({s.name, out.error});
        continue;
      }
      std::string id = fmt::format("{}_i{}", s.name, iteration);
      SvaAst ast = out.result->ast;
      ast.label.clear();
      f.assertions.push_back({id, s.name, render_sva(ast), provenance_json(id, *out.result)});
    }
    return f;
  }

  /// Generable signals named after "affecting" in a cue.
  std::set<std::string> targets_for(const std::vector<std::string>& cues) const {
    std::set<std::string> out;
    for (const auto& cue : cues) {
      auto pos = cue.find(" affecting ");
      if (pos == std::string::npos) continue;
      for (auto& name : util::split(cue.substr(pos + 11), ',')) {
        std::string n(util::trim(name));
        for (const auto& s : signals)
          if (s.name == n && s.generable()) out.insert(n);
      }
    }
    return out;
  }
};

}  // namespace

void Pipeline::generate() {
  Generator gen(cfg_, client(), dir("signals") / "signals.json");
  auto f = gen.run(0, {}, {});
  util::write_file(iter_file(dir("assertions"), 0, "json"), write_iteration(cfg_.design, f));
  util::write_file(iter_file(dir("assertions"), 0, "sva"), write_sva(f));
}

void Pipeline::mutate() {
  auto rtl = load_rtl(cfg_.rtl);
  auto mutants = generate_mutants(rtl, cfg_.mutant_budget, cfg_.mutant_seed);
  fs::remove_all(dir("mutants"));
  write_mutants(dir("mutants"), rtl, mutants, cfg_.mutant_budget, cfg_.mutant_seed);
}

void Pipeline::check() {
  auto rtl = load_rtl(cfg_.rtl);
  auto mutants = load_mutants(dir("mutants"));
  auto f = read_iteration(iter_file(dir("assertions"), 0, "json"));
  std::vector<NamedAssertion> named;
  for (const auto& a : f.assertions) named.push_back(to_named(a));
  auto ccfg = check_config_for(cfg_, named);
  GoldenMap golden;
  for (const auto& a : named) golden[a.id] = golden_kind(a.ast, rtl, ccfg);
  util::write_file(dir("matrix") / "golden.json", write_golden(cfg_.design, golden));
  auto result = build_matrix(named, mutants, ccfg);
  util::write_file(iter_file(dir("matrix"), 0, "json"), matrix_to_json(result.matrix));
  fs::remove_all(dir("matrix") / "witnesses");
  write_witnesses(dir("matrix") / "witnesses", result);
}

void Pipeline::evaluate() {
  auto rtl = load_rtl(cfg_.rtl);
  auto mutants = load_mutants(dir("mutants"));
  auto first = read_iteration(iter_file(dir("assertions"), 0, "json"));
  GoldenMap golden = read_golden(dir("matrix") / "golden.json");

  // Rows already computed by the check stage.
  std::map<std::string, std::vector<std::uint8_t>> cached;
  if (fs::exists(iter_file(dir("matrix"), 0, "json"))) {
    auto m = matrix_from_json(util::read_file(iter_file(dir("matrix"), 0, "json")));
    std::vector<std::string> mids;
    for (const auto& mu : mutants) mids.push_back(mu.id);
    if (m.mutants == mids)
      for (std::size_t i = 0; i < m.n(); ++i) {
        std::vector<std::uint8_t> row(m.k());
        for (std::size_t j = 0; j < m.k(); ++j) row[j] = m.at(i, j) ? 1 : 0;
        cached[m.assertions[i]] = row;
      }
  }

  std::vector<IterationFile> files{first};
  std::map<std::string, std::string> texts;
  for (const auto& a : first.assertions) texts[a.id] = a.text;

  std::vector<NamedAssertion> initial;
  for (const auto& a : first.assertions) {
    initial.push_back(to_named(a));
    if (!golden.count(a.id)) golden[a.id] = golden_kind(initial.back().ast, rtl, check_config_for(cfg_, {initial.back()}));
  }

  Generator gen(cfg_, client(), dir("signals") / "signals.json");

  RefinementHooks hooks;
  hooks.check = [&](const std::vector<NamedAssertion>& as) {
    std::vector<NamedAssertion> fresh;
    for (const auto& a : as)
      if (!cached.count(a.id)) fresh.push_back(a);
    if (!fresh.empty()) {
      auto m = build_matrix(fresh, mutants, check_config_for(cfg_, fresh)).matrix;
      for (std::size_t i = 0; i < m.n(); ++i) {
        std::vector<std::uint8_t> row(m.k());
        for (std::size_t j = 0; j < m.k(); ++j) row[j] = m.at(i, j) ? 1 : 0;
        cached[m.assertions[i]] = row;
      }
    }
    std::vector<std::string> aids, mids;
    for (const auto& a : as) aids.push_back(a.id);
    for (const auto& mu : mutants) mids.push_back(mu.id);
    DetectionMatrix out(aids, mids);
    for (std::size_t i = 0; i < as.size(); ++i)
      for (std::size_t j = 0; j < mids.size(); ++j) out.set(i, j, cached[as[i].id][j] != 0);
    return out;
  };
  hooks.regenerate = [&](int iteration, const std::vector<std::string>& cues) {
    auto f = gen.run(iteration, cues, gen.targets_for(cues));
    util::write_file(iter_file(dir("assertions"), iteration, "json"), write_iteration(cfg_.design, f));
    util::write_file(iter_file(dir("assertions"), iteration, "sva"), write_sva(f));
    std::vector<NamedAssertion> out;
    for (const auto& a : f.assertions) {
      out.push_back(to_named(a));
      texts[a.id] = a.text;
      golden[a.id] = golden_kind(out.back().ast, rtl, check_config_for(cfg_, {out.back()}));
    }
    files.push_back(f);
    return out;
  };

  RefinementConfig rc;
  rc.max_iter = cfg_.max_iter;
  auto history = run_refinement(initial, mutants, rc, hooks);

  for (const auto& st : history)
    util::write_file(iter_file(dir("matrix"), st.iteration, "json"), matrix_to_json(st.matrix));
  util::write_file(dir("matrix") / "golden.json", write_golden(cfg_.design, golden));

  const auto& last = history.back();
  std::vector<AssertionEntry> final_entries;
  for (const auto& id : last.survivors) final_entries.push_back({id, id + ": " + texts[id], std::nullopt, {}});
  util::write_file(dir("assertions") / "final.sva", write_assertion_file(final_entries, "final set"));

  ReportRow row;
  row.design = cfg_.design;
  row.method = method_label(cfg_);
  for (const auto& f : files) {
    row.generated += f.assertions.size() + f.failures.size();
    row.syntax_correct += f.assertions.size();
    for (const auto& a : f.assertions)
      if (!golden_fails(golden[a.id])) ++row.functional_correct;
  }
  row.final_count = last.survivors.size();
  row.mutants = mutants.size();
  row.avg_score_pre = last.avg_pre;
  row.avg_score_post = last.avg_post;
  row.mdr = last.mdr;
  row.iterations = static_cast<int>(history.size());
  row.stop_reason = last.stop ? std::string(to_string(*last.stop)) : "";

  std::map<std::string, bool> fails;
  std::vector<std::string> failing;
  for (const auto& id : last.survivors) {
    fails[id] = golden_fails(golden[id]);
    if (fails[id]) failing.push_back(id);
  }
  LabelMap labels;
  if (!cfg_.labels.empty()) labels = parse_labels(util::read_file(cfg_.labels));
  std::vector<std::string> unlabeled;
  for (const auto& id : failing)
    if (!labels.count(id)) unlabeled.push_back(id);
  fs::remove(dir("report") / "labels_template.json");
  if (unlabeled.empty()) {
    LabelMap effective = labels;
    for (const auto& id : last.survivors)
      if (!effective.count(id)) effective[id] = Label{true, ""};
    row.fpr = fpr(last.survivors, fails, effective);
  } else {
    LabelMap tmpl;
    for (const auto& id : unlabeled) tmpl[id] = Label{false, "fails on the golden design; review and set"};
    util::write_file(dir("report") / "labels_template.json", write_labels(tmpl));
  }

  auto report = report_json({row}, history);
  report["golden"] = ordered_json::object();
  for (const auto& [id, kind] : golden) report["golden"][id] = kind;
  util::write_file(dir("report") / "report.json", report.dump(2) + "\n");
  util::write_file(dir("report") / "report.md", report_markdown({row}));
}

}  // namespace specsva
