// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/classify.hpp"

#include <array>
#include <cctype>
#include <regex>

#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/util.hpp"

namespace specsva {

namespace {

constexpr std::string_view kSystemPrompt =
    "You are a hardware specification analyst. You know signal semantics, interface conventions and timing "
    "behavior, and you label content blocks that a layout-aware parser cut out of a design specification.\n"
    "\n"
    "For the block you are given, decide:\n"
    "- its modality, one of: TEXT, TABLE, FORMULA, DIAGRAM\n"
    "- its semantic category. Typical categories are Architecture, Module Interface, Timing Behavior, "
    "Control Logic, Reset Behavior and Configuration Info; use a short new label if none fits.\n"
    "\n"
    "Reason step-by-step before answering. Use the block text and any layout hints (block type, section, "
    "caption). Finish with exactly two lines:\n"
    "Modality: <MODALITY>\n"
    "Semantic category: <category>";

}  // namespace

ChatRequest build_classification_prompt(const ContentBlock& block, const ClassifyOptions& opts) {
  ChatRequest req;
  req.tag = "classify";
  req.system = std::string(kSystemPrompt);
  if (!opts.example_input.empty())
    req.system += fmt::format("\n\nExample block:\n\"{}\"\nExample answer:\n{}", opts.example_input,
                              opts.example_output);
  std::string user;
  if (!block.layout_hints.empty()) {
    user += "Layout hints:\n";
    for (const auto& [k, v] : block.layout_hints) user += fmt::format("- {}: {}\n", k, v);
    user += "\n";
  }
  user += "Block content:\n" + block.content;
  req.user = std::move(user);
  return req;
}

ClassificationResult parse_classification(std::string_view response) {
  auto lines = util::split_lines(response);
  std::optional<std::size_t> mod_line;
  std::optional<std::size_t> cat_line;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto l = util::trim(lines[i]);
    while (!l.empty() && (l.front() == '*' || l.front() == '-' || l.front() == '#')) l = util::trim(l.substr(1));
    if (util::starts_with_ci(l, "modality:")) mod_line = i;
    if (util::starts_with_ci(l, "semantic category:")) cat_line = i;
  }
  if (!mod_line) throw Error(ErrorKind::UnparseableResponse, "no 'Modality:' line in response", std::nullopt, "classify");
  if (!cat_line)
    throw Error(ErrorKind::UnparseableResponse, "no 'Semantic category:' line in response", std::nullopt, "classify");

  auto value_of = [&](std::size_t i) {
    auto l = std::string(util::trim(lines[i]));
    auto colon = l.find(':');
    std::string v(util::trim(std::string_view(l).substr(colon + 1)));
    std::string cleaned;
    for (char c : v)
      if (c != '*' && c != '`') cleaned += c;
    return std::string(util::trim(cleaned));
  };
  std::string mod_text;
  for (char c : value_of(*mod_line))
    if (std::isalpha(static_cast<unsigned char>(c))) mod_text += c;
  auto modality = parse_modality(mod_text);
  if (!modality)
    throw Error(ErrorKind::UnparseableResponse, fmt::format("unknown modality '{}'", value_of(*mod_line)),
                std::nullopt, "classify");
  std::string cat = value_of(*cat_line);
  while (!cat.empty() && (cat.back() == '.' || cat.back() == ',')) cat.pop_back();
  if (cat.empty()) throw Error(ErrorKind::UnparseableResponse, "empty semantic category", std::nullopt, "classify");

  ClassificationResult r;
  r.modality = *modality;
  r.category = SemanticCategory::from_text(cat);
  std::vector<std::string> rationale;
  for (std::size_t i = 0; i < std::min(*mod_line, *cat_line); ++i) rationale.push_back(lines[i]);
  r.rationale = std::string(util::trim(util::join(rationale, "\n")));
  return r;
}

std::string render_classification(const ClassificationResult& r) {
  std::string out;
  if (!r.rationale.empty()) out += r.rationale + "\n";
  out += fmt::format("Modality: {}\nSemantic category: {}", to_string(r.modality), r.category.name());
  return out;
}

namespace {

const std::regex& timing_event_re() {
  static const std::regex re(R"(\b(rise|rises|fall|falls|descend|descends)\s+at\s+cycle\s+\d+)", std::regex::icase);
  return re;
}

bool looks_formula_line(std::string_view line) {
  auto l = util::trim(line);
  if (l.empty()) return false;
  if (l.front() == '$') return true;
  bool relation = l.find("\xE2\x89\xA4") != std::string_view::npos ||  // ≤
                  l.find("\xE2\x89\xA5") != std::string_view::npos ||  // ≥
                  l.find('=') != std::string_view::npos;
  if (!relation) return false;
  std::size_t words = 0;
  for (const auto& w : util::split(l, ' '))
    if (!util::trim(w).empty()) ++words;
  return words <= 8;
}

Modality rule_modality(const ContentBlock& b, std::string& why) {
  auto type = util::lower(b.hint("block_type"));
  std::vector<std::string> lines;
  for (const auto& l : util::split_lines(b.content))
    if (!util::trim(l).empty()) lines.emplace_back(util::trim(l));
  std::size_t grid = 0;
  std::size_t formula = 0;
  for (const auto& l : lines) {
    if (l.front() == '|') ++grid;
    if (looks_formula_line(l)) ++formula;
  }
  if (type.find("table") != std::string::npos) {
    why = "layout hint marks a table";
    return Modality::Table;
  }
  if (grid >= 2 && grid * 2 > lines.size()) {
    why = "'|'-delimited grid";
    return Modality::Table;
  }
  if (type == "figure" || type == "diagram") {
    why = "layout hint marks a figure";
    return Modality::Diagram;
  }
  if ((b.content.find("--(") != std::string::npos && b.content.find(")-->") != std::string::npos) ||
      std::regex_search(b.content, timing_event_re())) {
    why = "transition arrows or waveform events";
    return Modality::Diagram;
  }
  if (type.find("formula") != std::string::npos || (formula > 0 && formula * 2 > lines.size())) {
    why = "relational expression lines";
    return Modality::Formula;
  }
  why = "prose";
  return Modality::Text;
}

struct CategoryKeywords {
  SemanticCategory::Kind kind;
  std::vector<std::string_view> words;
};

const std::array<CategoryKeywords, 6>& category_keywords() {
  static const std::array<CategoryKeywords, 6> table = {{
      {SemanticCategory::Kind::ResetBehavior, {"reset", "rst", "rst_n", "resets"}},
      {SemanticCategory::Kind::TimingBehavior,
       {"cycle", "cycles", "clock", "after", "latency", "delay", "within", "rise", "fall", "timing", "waveform",
        "edge"}},
      {SemanticCategory::Kind::ModuleInterface,
       {"input", "output", "inout", "port", "ports", "dir", "direction", "width", "interface", "bits", "bit"}},
      {SemanticCategory::Kind::ControlLogic,
       {"state", "states", "fsm", "transition", "transitions", "idle", "next_state", "control", "enable", "-->"}},
      {SemanticCategory::Kind::ConfigurationInfo,
       {"register", "registers", "config", "configuration", "parameter", "mode", "addr", "address", "offset"}},
      {SemanticCategory::Kind::Architecture,
       {"architecture", "submodule", "submodules", "hierarchy", "datapath", "top-level", "subsystem"}},
  }};
  return table;
}

SemanticCategory rule_category(const ContentBlock& b, std::string& why) {
  auto text = util::lower(b.content);
  // Tokens: identifier-ish words plus the arrow marker.
  std::vector<std::pair<std::string, std::size_t>> tokens;
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, 3, "-->") == 0) {
      tokens.emplace_back("-->", i);
      i += 3;
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '-'))
        ++j;
      std::string w = text.substr(i, j - i);
      while (!w.empty() && w.back() == '-') w.pop_back();
      tokens.emplace_back(w, i);
      i = j;
      continue;
    }
    ++i;
  }
  const auto& table = category_keywords();
  std::array<std::size_t, 6> votes{};
  std::array<std::size_t, 6> first{};
  first.fill(std::string::npos);
  for (const auto& [w, pos] : tokens) {
    for (std::size_t c = 0; c < table.size(); ++c) {
      if (std::find(table[c].words.begin(), table[c].words.end(), w) == table[c].words.end()) continue;
      ++votes[c];
      first[c] = std::min(first[c], pos);
    }
  }
  std::size_t best = table.size();
  for (std::size_t c = 0; c < table.size(); ++c) {
    if (votes[c] == 0) continue;
    if (best == table.size() || votes[c] > votes[best] || (votes[c] == votes[best] && first[c] < first[best]))
      best = c;
  }
  if (best == table.size()) {
    why = "no category keywords";
    return SemanticCategory::other("General");
  }
  SemanticCategory cat(table[best].kind);
  why = fmt::format("{} keyword hit(s) for {}", votes[best], cat.name());
  return cat;
}

}  // namespace

ClassificationResult classify_rules(const ContentBlock& block) {
  ClassificationResult r;
  std::string why_mod;
  std::string why_cat;
  r.modality = rule_modality(block, why_mod);
  r.category = rule_category(block, why_cat);
  r.rationale = fmt::format("rule-based: {}; {}", why_mod, why_cat);
  return r;
}

ClassificationResult classify_block(const ContentBlock& block, LlmClient* client, const ClassifyOptions& opts) {
  if (client == nullptr || client->is_mock()) return classify_rules(block);
  ChatRequest req = build_classification_prompt(block, opts);
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1)
      req.user += "\n\nYour previous answer could not be read. End with the two lines 'Modality: ...' and "
                  "'Semantic category: ...'.";
    try {
      return parse_classification(client->complete(req));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnparseableResponse) throw;
    }
  }
  return classify_rules(block);
}

void classify_document(SpecDocument& doc, LlmClient* client, const ClassifyOptions& opts) {
  for (auto& b : doc.blocks) {
    auto r = classify_block(b, client, opts);
    b.modality = r.modality;
    b.semantic_category = r.category;
  }
}

}  // namespace specsva
