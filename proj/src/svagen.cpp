// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/svagen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/util.hpp"

namespace specsva {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(AssertionPattern p) {
  switch (p) {
    case AssertionPattern::Implication: return "Implication";
    case AssertionPattern::Stability: return "Stability";
    case AssertionPattern::Invariant: return "Invariant";
  }
  return "Implication";
}

std::optional<AssertionPattern> parse_pattern(std::string_view text) {
  for (auto p : {AssertionPattern::Implication, AssertionPattern::Stability, AssertionPattern::Invariant})
    if (util::iequals(util::trim(text), to_string(p))) return p;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Retrieval.

namespace {

constexpr std::size_t kMaxChunkTokens = 400;
constexpr double kK1 = 1.2;
constexpr double kB = 0.75;

}  // namespace

std::vector<std::string> RetrievalIndex::tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (text.compare(i, 3, "|->") == 0 || text.compare(i, 3, "|=>") == 0) {
      out.emplace_back(text.substr(i, 3));
      i += 3;
    } else if (text.compare(i, 2, "##") == 0) {
      out.emplace_back("##");
      i += 2;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '$'))
        ++j;
      out.push_back(util::lower(text.substr(i, j - i)));
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

RetrievalIndex RetrievalIndex::build(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::EmptyCorpus, "corpus directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".md" || ext == ".txt")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  RetrievalIndex idx;
  for (const auto& f : files) {
    auto rel = fs::relative(f, dir).generic_string();
    std::vector<std::string> paragraphs;
    std::string cur;
    for (const auto& line : util::split_lines(util::read_file(f))) {
      if (util::trim(line).empty()) {
        if (!cur.empty()) paragraphs.push_back(std::move(cur));
        cur.clear();
        continue;
      }
      if (!cur.empty()) cur += "\n";
      cur += line;
    }
    if (!cur.empty()) paragraphs.push_back(std::move(cur));

    std::size_t n = 0;
    Chunk chunk;
    auto flush = [&] {
      if (chunk.tokens.empty()) return;
      chunk.id = fmt::format("{}#{}", rel, n++);
      idx.chunks_.push_back(std::move(chunk));
      chunk = Chunk{};
    };
    for (const auto& p : paragraphs) {
      auto toks = tokenize(p);
      if (toks.size() > kMaxChunkTokens) {
        flush();
        auto words = util::split(p, ' ');
        std::string part;
        for (const auto& w : words) {
          auto wt = tokenize(w);
          if (chunk.tokens.size() + wt.size() > kMaxChunkTokens) {
            chunk.text = part;
            flush();
            part.clear();
          }
          if (!part.empty()) part += " ";
          part += w;
          chunk.tokens.insert(chunk.tokens.end(), wt.begin(), wt.end());
        }
        chunk.text = part;
        flush();
        continue;
      }
      if (chunk.tokens.size() + toks.size() > kMaxChunkTokens) flush();
      if (!chunk.text.empty()) chunk.text += "\n\n";
      chunk.text += p;
      chunk.tokens.insert(chunk.tokens.end(), toks.begin(), toks.end());
    }
    flush();
  }
  if (idx.chunks_.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus has no text: " + dir.string());
  double total = 0;
  for (const auto& c : idx.chunks_) total += static_cast<double>(c.tokens.size());
  idx.avg_len_ = total / static_cast<double>(idx.chunks_.size());
  return idx;
}

std::vector<Passage> RetrievalIndex::retrieve(std::string_view query, std::size_t k) const {
  if (k == 0) return {};
  auto qt = tokenize(query);
  std::set<std::string> terms(qt.begin(), qt.end());
  const double N = static_cast<double>(chunks_.size());
  std::map<std::string, double> idf;
  for (const auto& t : terms) {
    double df = 0;
    for (const auto& c : chunks_)
      if (std::find(c.tokens.begin(), c.tokens.end(), t) != c.tokens.end()) ++df;
    idf[t] = std::log(1.0 + (N - df + 0.5) / (df + 0.5));
  }
  std::vector<Passage> scored;
  for (const auto& c : chunks_) {
    double score = 0;
    const double len = static_cast<double>(c.tokens.size());
    for (const auto& t : terms) {
      double tf = static_cast<double>(std::count(c.tokens.begin(), c.tokens.end(), t));
      if (tf == 0) continue;
      score += idf[t] * tf * (kK1 + 1) / (tf + kK1 * (1 - kB + kB * len / avg_len_));
    }
    if (score > 0) scored.push_back({c.id, c.text, score});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Passage& a, const Passage& b) { return a.score > b.score; });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::vector<Passage> retrieve(std::string_view query, const fs::path& corpus_dir, std::size_t k) {
  return RetrievalIndex::build(corpus_dir).retrieve(query, k);
}

// ---------------------------------------------------------------------------
// Deterministic steps.

namespace {

struct Window {
  int lo = 0;
  int hi = 0;
  int hold = 1;
};

std::optional<Window> parse_timing_prose(std::string_view timing) {
  std::string t = util::lower(util::trim(timing));
  while (!t.empty() && t.back() == '.') t.pop_back();
  static const std::regex between(R"(between\s+(\d+)\s+and\s+(\d+)\s+cycles?)");
  static const std::regex within(R"(within\s+(\d+)\s+cycles?)");
  static const std::regex exact(R"((?:after|in|exactly)\s+(\d+)\s+cycles?)");
  static const std::regex next(R"(\bnext\s+(?:clock\s+)?(?:cycle|edge)\b)");
  static const std::regex same(R"(\bsame\s+cycle\b|\bimmediately\b)");
  static const std::regex hold(
      R"((?:hold|holds|held|stay|stays|remain|remains)(?:\s+high|\s+asserted)?\s+for\s+(?:>=\s*|at\s+least\s+)?(\d+)\s+cycles?)");
  std::smatch m;
  std::optional<Window> w;
  if (std::regex_search(t, m, between))
    w = Window{std::stoi(m[1].str()), std::stoi(m[2].str())};
  else if (std::regex_search(t, m, within))
    w = Window{0, std::stoi(m[1].str())};
  else if (std::regex_search(t, m, exact))
    w = Window{std::stoi(m[1].str()), std::stoi(m[1].str())};
  else if (std::regex_search(t, next))
    w = Window{1, 1};
  else if (std::regex_search(t, same))
    w = Window{0, 0};
  if (!w) return std::nullopt;
  if (std::regex_search(t, m, hold)) w->hold = std::max(1, std::stoi(m[1].str()));
  return w;
}

bool is_fragment(std::string_view timing) {
  return timing.find("##") != std::string_view::npos || timing.find("[*") != std::string_view::npos;
}

std::string first_identifier(std::string_view text) {
  for (const auto& id : util::identifiers_in(text)) return id;
  return {};
}

ExprParseOptions sva_expr_options() {
  ExprParseOptions o;
  o.allow_system_calls = true;
  return o;
}

}  // namespace

std::string bind_temporal(std::string_view timing, std::string_view signal) {
  auto t = util::trim(timing);
  if (is_fragment(t)) {
    try {
      parse_sequence_text(t);
    } catch (const Error& e) {
      throw Error(ErrorKind::UnboundTiming, fmt::format("timing fragment '{}' does not parse: {}", t, e.what()));
    }
    return std::string(t);
  }
  auto w = parse_timing_prose(t);
  if (!w) throw Error(ErrorKind::UnboundTiming, fmt::format("cannot bind timing '{}'", t));
  if (w->lo > w->hi) throw Error(ErrorKind::UnboundTiming, fmt::format("empty window in '{}'", t));
  if (signal.empty()) throw Error(ErrorKind::UnboundTiming, "no signal to bind the timing window to");
  Sequence seq;
  seq.terms.push_back({{w->lo, w->hi}, Expr::ident(std::string(signal)), w->hold});
  return render_sequence(seq);
}

std::string normalize_condition(std::string_view text) {
  static const std::regex split_re(R"(\s*(&&|\|\|)\s*)");
  static const std::regex level_re(
      R"(^(.+?)\s+(?:is|are|must\s+be|should\s+be|must\s+become|becomes|goes|stays|remains)\s+(high|low|asserted|deasserted|set|cleared|true|false)$)",
      std::regex::icase);
  static const std::regex value_re(
      R"(^(.+?)\s+(?:is|equals|must\s+be|must\s+equal|should\s+be)\s+([A-Za-z0-9_']+)$)", std::regex::icase);
  std::string src(util::trim(text));
  std::string out;
  auto rewrite = [](std::string clause) {
    clause = std::string(util::trim(clause));
    std::smatch m;
    if (std::regex_match(clause, m, level_re)) {
      std::string lhs(util::trim(m[1].str()));
      auto v = util::lower(m[2].str());
      bool positive = v == "high" || v == "asserted" || v == "set" || v == "true";
      if (positive) return lhs;
      bool simple = std::all_of(lhs.begin(), lhs.end(), util::is_ident_char);
      return simple ? "!" + lhs : "!(" + lhs + ")";
    }
    if (std::regex_match(clause, m, value_re)) return fmt::format("{} == {}", util::trim(m[1].str()), m[2].str());
    return clause;
  };
  auto begin = std::sregex_iterator(src.begin(), src.end(), split_re);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    out += rewrite(src.substr(last, it->position() - last));
    out += " " + (*it)[1].str() + " ";
    last = it->position() + it->length();
  }
  out += rewrite(src.substr(last));
  return render_expr(parse_expression_text(out, sva_expr_options()));
}

AssertionPattern select_pattern(const IntentTriplet& triplet, const std::vector<TemporalRole>& roles) {
  bool window = false;
  if (!util::trim(triplet.timing).empty()) {
    try {
      auto sig = first_identifier(triplet.consequence);
      bind_temporal(triplet.timing, sig.empty() ? "x" : sig);
      window = true;
    } catch (const Error&) {
    }
  }
  bool pre = !util::trim(triplet.precondition).empty();
  if (window || pre) return AssertionPattern::Implication;
  if (std::find(roles.begin(), roles.end(), TemporalRole::Stabilizer) != roles.end())
    return AssertionPattern::Stability;
  return AssertionPattern::Invariant;
}

GenerationRequest make_request(const SignalSpec& spec, int iteration, std::vector<std::string> mutation_points) {
  GenerationRequest req;
  req.signal = spec.name;
  req.roles = spec.roles;
  req.iteration = iteration;
  req.mutation_points = std::move(mutation_points);
  if (spec.intent) {
    req.triplet = *spec.intent;
  } else if (!spec.invariant.empty() && spec.has_role(TemporalRole::InvariantHolder)) {
    req.triplet.consequence = spec.invariant;
  } else {
    throw Error(ErrorKind::NonGenerableSignal,
                fmt::format("signal '{}' has no intent triplet and no invariant", spec.name));
  }
  return req;
}

GenerationResult synthesize_deterministic(const GenerationRequest& req, const std::string& clock) {
  const auto& tr = req.triplet;
  GenerationResult r;
  r.signal = req.signal;
  r.deterministic = true;
  r.iteration = req.iteration;
  r.pattern = select_pattern(tr, req.roles);

  std::string cons = util::trim(tr.consequence).empty() ? req.signal : normalize_condition(tr.consequence);
  Expr cexpr = parse_expression_text(cons, sva_expr_options());
  std::string sig = first_identifier(cons);
  if (sig.empty()) sig = req.signal;

  SvaAst ast;
  ast.clock = clock;
  std::string pre;
  switch (r.pattern) {
    case AssertionPattern::Implication: {
      if (!util::trim(tr.precondition).empty()) {
        pre = normalize_condition(tr.precondition);
        Sequence a;
        a.terms.push_back({{0, 0}, parse_expression_text(pre, sva_expr_options()), 1});
        ast.antecedent = a;
      }
      if (util::trim(tr.timing).empty()) {
        ast.consequent.terms.push_back({{0, 0}, cexpr, 1});
        r.steps.temporal = "##0";
        break;
      }
      auto fragment = bind_temporal(tr.timing, sig);
      auto seq = parse_sequence_text(fragment);
      bool plain = cexpr == Expr::ident(sig) ||
                   (cexpr.kind == ExprKind::Binary && cexpr.op == Op::Eq && cexpr.args[0] == Expr::ident(sig) &&
                    cexpr.args[1].kind == ExprKind::Const && cexpr.args[1].value == 1);
      if (!plain && seq.terms.back().expr == Expr::ident(sig)) seq.terms.back().expr = cexpr;
      ast.consequent = seq;
      r.steps.temporal = render_sequence(seq);
      break;
    }
    case AssertionPattern::Stability: {
      Expr call;
      call.kind = ExprKind::Call;
      call.name = "$stable";
      call.args.push_back(Expr::ident(sig));
      ast.consequent.terms.push_back({{0, 0}, call, 1});
      r.steps.temporal = "every cycle";
      break;
    }
    case AssertionPattern::Invariant:
      ast.consequent.terms.push_back({{0, 0}, cexpr, 1});
      r.steps.temporal = "every cycle";
      break;
  }
  if (pre.empty())
    r.steps.decomposition = fmt::format("{} must hold ({}).", cons, tr.timing.empty() ? "every cycle" : tr.timing);
  else
    r.steps.decomposition = fmt::format("If ({}), then {} must hold; timing: {}.", pre, cons, tr.timing);
  r.steps.pattern = std::string(to_string(r.pattern));
  r.steps.final_text = render_sva(ast);
  r.ast = parse_sva(r.steps.final_text);
  return r;
}

// ---------------------------------------------------------------------------
// LLM path.

namespace {

constexpr std::string_view kGenerationSystem =
    "You are a hardware verification engineer who writes SystemVerilog Assertions (SVA) from structured "
    "signal specifications.";

constexpr std::string_view kGenerationSteps =
    "Write one SVA for the signal intent below. Reason step-by-step and work through four steps.\n"
    "Step 1 - Semantic Decomposition: restate the intent as a precondition (when the check starts), a "
    "consequence (what the signal must do) and a timing window (when it must happen).\n"
    "Step 2 - Pattern Selection: pick the closest pattern:\n"
    "  - Implication (a trigger obliges a response inside a cycle window)\n"
    "  - Stability (the signal keeps its value from one cycle to the next)\n"
    "  - Invariant (a condition that is true in every cycle)\n"
    "Step 3 - Temporal Binding: express the timing with SVA delays and repetitions such as ##[1:3] or [*2].\n"
    "Step 4 - SVA Syntax Synthesis: write a single `assert property` statement clocked on the rising clock "
    "edge, using the operators |-> or |=> where needed.\n"
    "\n"
    "Answer in exactly this layout:\n"
    "Step 1: <decomposition>\n"
    "Step 2: Pattern: <Implication|Stability|Invariant>\n"
    "Step 3: Temporal: <SVA timing fragment>\n"
    "Step 4: assert property (@(posedge clk) ...);";

}  // namespace

ChatRequest build_generation_prompt(const GenerationRequest& req) {
  if (util::trim(req.triplet.consequence).empty() && util::trim(req.triplet.precondition).empty())
    throw Error(ErrorKind::NonGenerableSignal, fmt::format("signal '{}' has an empty intent", req.signal));
  ChatRequest c;
  c.tag = "generate";
  c.system = std::string(kGenerationSystem);
  std::string u = std::string(kGenerationSteps) + "\n";
  if (!req.mutation_points.empty()) {
    u += "\nFEEDBACK:\nThe current assertions miss the injected faults listed below. Make the new assertion "
         "sensitive to them.\n";
    u += "- mutation_points: " + json(req.mutation_points).dump() + "\n";
  }
  if (!req.retrieved.empty()) {
    u += "\nREFERENCES:\n";
    for (const auto& p : req.retrieved) u += fmt::format("[{}]\n{}\n", p.id, p.text);
  }
  nlohmann::ordered_json input = {{"signal", req.signal},
                {"precondition", req.triplet.precondition},
                {"consequence", req.triplet.consequence},
                {"timing", req.triplet.timing},
                {"mutation_points", req.mutation_points}};
  u += "\nINPUT:\n" + input.dump(2);
  c.user = std::move(u);
  return c;
}

namespace {

std::string clean(std::string_view s) {
  std::vector<std::string> kept;
  for (const auto& line : util::split_lines(s)) {
    auto t = util::trim(line);
    if (t.starts_with("```")) continue;
    kept.emplace_back(t);
  }
  auto out = util::replace_all(util::join(kept, "\n"), "**", "");
  out = util::replace_all(out, "`", "");
  return std::string(util::trim(out));
}

std::string strip_prefix_ci(std::string s, std::string_view prefix) {
  auto t = std::string(util::trim(s));
  if (util::starts_with_ci(t, prefix)) t = std::string(util::trim(std::string_view(t).substr(prefix.size())));
  return t;
}

}  // namespace

GenerationResult parse_generation_response(std::string_view text) {
  static const std::regex marker(R"((^|\n)[ \t#*>\-]*step\s*([1-4])\b[^\n:]*:?)", std::regex::icase);
  std::string src(text);
  std::array<std::ptrdiff_t, 4> body_begin{};
  std::array<std::ptrdiff_t, 4> mark_begin{};
  int want = 1;
  for (auto it = std::sregex_iterator(src.begin(), src.end(), marker); it != std::sregex_iterator() && want <= 4;
       ++it) {
    if (std::stoi((*it)[2].str()) != want) continue;
    mark_begin[want - 1] = it->position();
    body_begin[want - 1] = it->position() + it->length();
    ++want;
  }
  if (want <= 4) throw Error(ErrorKind::UnparseableResponse, fmt::format("response has no Step {}", want), std::nullopt, "generate");
  std::array<std::string, 4> body;
  for (int i = 0; i < 4; ++i) {
    auto end = i < 3 ? mark_begin[i + 1] : static_cast<std::ptrdiff_t>(src.size());
    body[i] = clean(std::string_view(src).substr(body_begin[i], end - body_begin[i]));
  }
  GenerationResult r;
  r.steps.decomposition = body[0];
  static const std::regex pat_re(R"(\b(implication|stability|invariant)\b)", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(body[1], m, pat_re))
    throw Error(ErrorKind::UnparseableResponse, "Step 2 names no known pattern", std::nullopt, "generate");
  r.pattern = *parse_pattern(m[1].str());
  r.steps.pattern = std::string(to_string(r.pattern));
  r.steps.temporal = strip_prefix_ci(body[2], "temporal:");
  auto pos = util::lower(body[3]).find("assert property");
  if (pos == std::string::npos)
    throw Error(ErrorKind::UnparseableResponse, "Step 4 has no 'assert property'", std::nullopt, "generate");
  std::string stmt = body[3].substr(pos);
  if (auto semi = stmt.find(';'); semi != std::string::npos) stmt = stmt.substr(0, semi + 1);
  stmt = util::replace_all(stmt, "\n", " ");
  try {
    r.ast = parse_sva(stmt);
  } catch (const Error& e) {
    throw Error(ErrorKind::UnparseableResponse, fmt::format("Step 4 does not parse: {}", e.what()), std::nullopt,
                "generate");
  }
  r.ast.label.clear();
  r.steps.final_text = stmt;
  return r;
}

std::string retrieval_query(const GenerationRequest& req) {
  std::string q = fmt::format("{} {} {} {}", req.signal, req.triplet.precondition, req.triplet.consequence,
                              req.triplet.timing);
  q += util::trim(req.triplet.precondition).empty() ? " invariant" : " implication";
  for (const auto& c : req.mutation_points) q += " " + c;
  return q;
}

GenerationOutcome generate_assertion(GenerationRequest req, LlmClient* client, const RetrievalIndex* index,
                                     const GenerateOptions& opts) {
  GenerationOutcome out;
  if (!opts.chain_of_thought || client == nullptr) {
    out.result = synthesize_deterministic(req, opts.clock);
    return out;
  }
  if (index != nullptr && opts.top_k > 0) req.retrieved = index->retrieve(retrieval_query(req), opts.top_k);
  ChatRequest prompt = build_generation_prompt(req);
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      out.raw = client->complete(prompt);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::FixtureMiss && attempt == 0) {
        out.result = synthesize_deterministic(req, opts.clock);
        return out;
      }
      throw;
    }
    try {
      auto r = parse_generation_response(out.raw);
      r.signal = req.signal;
      r.iteration = req.iteration;
      r.repaired = attempt == 1;
      for (const auto& p : req.retrieved) r.passage_ids.push_back(p.id);
      out.result = std::move(r);
      out.error.clear();
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnparseableResponse) throw;
      out.error = e.what();
    }
    prompt.user += "\n\nYour previous answer could not be used: " + out.error +
                   "\nRepeat all four steps; Step 4 must be one valid `assert property` statement.";
  }
  return out;
}

json provenance_json(const std::string& id, const GenerationResult& r) {
  return {{"id", id},
          {"signal", r.signal},
          {"iteration", r.iteration},
          {"path", r.deterministic ? "template" : "llm"},
          {"repaired", r.repaired},
          {"pattern", to_string(r.pattern)},
          {"steps",
           {{"decomposition", r.steps.decomposition},
            {"pattern", r.steps.pattern},
            {"temporal", r.steps.temporal},
            {"final", r.steps.final_text}}},
          {"retrieved", r.passage_ids}};
}

}  // namespace specsva
