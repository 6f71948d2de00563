// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/analyzers.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "specsva/error.hpp"
#include "specsva/util.hpp"

namespace specsva {

using nlohmann::json;

namespace {

constexpr std::string_view kRecordsSchema = "specsva/records";
constexpr int kSchemaVersion = 1;

Error unparseable(const std::string& msg) { return Error(ErrorKind::UnparseableResponse, msg, std::nullopt, "analyze"); }

}  // namespace

std::string_view to_string(PortDirection d) {
  switch (d) {
    case PortDirection::Input: return "input";
    case PortDirection::Output: return "output";
    case PortDirection::Inout: return "inout";
  }
  return "input";
}

std::optional<PortDirection> parse_direction(std::string_view text) {
  auto t = util::lower(util::trim(text));
  if (t == "input" || t == "in") return PortDirection::Input;
  if (t == "output" || t == "out") return PortDirection::Output;
  if (t == "inout") return PortDirection::Inout;
  return std::nullopt;
}

std::string_view to_string(TableKind k) {
  switch (k) {
    case TableKind::Interface: return "interface";
    case TableKind::Register: return "register";
    case TableKind::Mode: return "mode";
    case TableKind::Other: return "other";
  }
  return "other";
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Eq: return "=";
    case Relation::Le: return "\xE2\x89\xA4";
    case Relation::Ge: return "\xE2\x89\xA5";
    case Relation::Lt: return "<";
    case Relation::Gt: return ">";
  }
  return "=";
}

std::string TableRecord::cell(std::size_t row, std::initializer_list<std::string_view> names) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    for (auto n : names)
      if (util::iequals(util::trim(header[c]), n)) return rows.at(row).at(c);
  return {};
}

std::string SourceRef::render() const {
  if (label.empty()) return fmt::format("{}: block {} (page {})", kind, block, page);
  return fmt::format("{}: {}", kind, label);
}

std::string_view Record::tag() const {
  switch (body.index()) {
    case 0: return "module_info";
    case 1: return "fsm";
    case 2: return "timing";
    case 3: return "table";
    default: return "formula";
  }
}

// ---------------------------------------------------------------------------
// Text analyzer.

ChatRequest build_text_prompt(const ContentBlock& block) {
  ChatRequest req;
  req.tag = "analyze";
  req.system =
      "You are an expert digital hardware design analyst. You read paragraphs taken from hardware "
      "specifications and turn them into structured design records.";
  req.user =
      "Extract the design information in this paragraph and answer with YAML that follows this schema:\n"
      "---\n"
      "name: string            # module name\n"
      "description: string\n"
      "ports:\n"
      "  - name: string\n"
      "    direction: input | output | inout\n"
      "    width: int          # bits\n"
      "    description: string\n"
      "implementation:         # any of reset, accumulation, output_behavior, counter_operation, ...\n"
      "  reset: string\n"
      "example_usage: string\n"
      "notes:\n"
      "  - string\n"
      "module_interface: string\n"
      "---\n"
      "Rules:\n"
      "- Only use facts stated in the paragraph.\n"
      "- Leave a field blank, or an empty list, when the paragraph does not say it. Never make values up.\n"
      "- Keep signal names and terminology exactly as written.\n"
      "\n"
      "Paragraph:\n" +
      block.content;
  return req;
}

namespace {

std::string scalar_text(const YAML::Node& n) {
  if (!n || n.IsNull()) return {};
  if (n.IsScalar()) return std::string(util::trim(n.Scalar()));
  throw unparseable("expected a scalar value");
}

std::string strip_fences(std::string_view response) {
  std::vector<std::string> kept;
  for (const auto& line : util::split_lines(response)) {
    auto t = util::trim(line);
    if (t.starts_with("```")) continue;
    if (t == "---") continue;
    kept.push_back(line);
  }
  return util::join(kept, "\n");
}

}  // namespace

ModuleInfo parse_module_info(std::string_view response) {
  YAML::Node root;
  try {
    root = YAML::Load(strip_fences(response));
  } catch (const YAML::Exception& e) {
    throw unparseable(fmt::format("response is not YAML: {}", e.what()));
  }
  if (!root.IsMap()) throw unparseable("response is not a YAML mapping");
  ModuleInfo m;
  try {
    m.name = scalar_text(root["name"]);
    m.description = scalar_text(root["description"]);
    m.example_usage = scalar_text(root["example_usage"]);
    m.module_interface = scalar_text(root["module_interface"]);
    if (auto ports = root["ports"]; ports && !ports.IsNull()) {
      if (!ports.IsSequence()) throw unparseable("ports must be a list");
      for (const auto& p : ports) {
        if (!p.IsMap()) throw unparseable("each port must be a mapping");
        PortDecl d;
        d.name = scalar_text(p["name"]);
        if (d.name.empty()) throw unparseable("port without a name");
        auto dir = parse_direction(scalar_text(p["direction"]));
        if (!dir) throw unparseable(fmt::format("port '{}' has no valid direction", d.name));
        d.direction = *dir;
        auto w = scalar_text(p["width"]);
        if (!w.empty()) {
          if (!std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw unparseable(fmt::format("port '{}' width '{}' is not an integer", d.name, w));
          d.width = std::stoi(w);
          if (d.width < 1) throw unparseable(fmt::format("port '{}' width must be positive", d.name));
        }
        d.description = scalar_text(p["description"]);
        m.ports.push_back(std::move(d));
      }
    }
    if (auto impl = root["implementation"]; impl && !impl.IsNull()) {
      auto add = [&](const YAML::Node& map) {
        for (const auto& kv : map) m.implementation.emplace_back(kv.first.as<std::string>(), scalar_text(kv.second));
      };
      if (impl.IsMap()) {
        add(impl);
      } else if (impl.IsSequence()) {
        for (const auto& item : impl) {
          if (!item.IsMap()) throw unparseable("implementation entries must be key: value");
          add(item);
        }
      } else {
        throw unparseable("implementation must be a mapping");
      }
    }
    if (auto notes = root["notes"]; notes && !notes.IsNull()) {
      if (notes.IsSequence()) {
        for (const auto& n : notes)
          if (auto s = scalar_text(n); !s.empty()) m.notes.push_back(s);
      } else if (auto s = scalar_text(notes); !s.empty()) {
        m.notes.push_back(s);
      }
    }
  } catch (const YAML::Exception& e) {
    throw unparseable(fmt::format("bad YAML structure: {}", e.what()));
  }
  return m;
}

ModuleInfo extract_module_info_rules(const ContentBlock& block) {
  static const std::regex port_re(
      R"(\b(input|output|inout)\s+`?([A-Za-z_]\w*)`?\s*\(\s*(\d+)[\s-]*bits?\s*\)\s*([^.;\n]*))",
      std::regex::icase);
  static const std::regex module_re(R"(\bmodule\s+`([A-Za-z_]\w*)`)", std::regex::icase);
  ModuleInfo m;
  std::smatch mm;
  if (std::regex_search(block.content, mm, module_re)) m.name = mm[1].str();
  for (auto it = std::sregex_iterator(block.content.begin(), block.content.end(), port_re);
       it != std::sregex_iterator(); ++it) {
    PortDecl d;
    d.direction = *parse_direction((*it)[1].str());
    d.name = (*it)[2].str();
    d.width = std::stoi((*it)[3].str());
    d.description = std::string(util::trim((*it)[4].str()));
    if (d.width < 1) continue;
    m.ports.push_back(std::move(d));
  }
  return m;
}

ModuleInfo analyze_text(const ContentBlock& block, LlmClient* client) {
  if (client == nullptr) return extract_module_info_rules(block);
  ChatRequest req = build_text_prompt(block);
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1) req.user += "\n\nThe previous answer was rejected (" + last_error + "). Answer with YAML only.";
    std::string response;
    try {
      response = client->complete(req);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::FixtureMiss && attempt == 0) return extract_module_info_rules(block);
      throw;
    }
    try {
      return parse_module_info(response);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnparseableResponse) throw;
      last_error = e.what();
    }
  }
  throw unparseable("text analyzer: " + last_error);
}

// ---------------------------------------------------------------------------
// Diagram analyzer.

namespace {

bool is_state_char(char c) { return util::is_ident_char(c); }

}  // namespace

std::vector<FsmTransition> parse_fsm_transitions(std::string_view text) {
  std::vector<FsmTransition> out;
  std::size_t pos = 0;
  while ((pos = text.find("--(", pos)) != std::string_view::npos) {
    auto close = text.find(")-->", pos + 3);
    if (close == std::string_view::npos) break;
    std::size_t s_end = pos;
    while (s_end > 0 && text[s_end - 1] == ' ') --s_end;
    std::size_t s_begin = s_end;
    while (s_begin > 0 && is_state_char(text[s_begin - 1])) --s_begin;
    std::size_t d_begin = close + 4;
    while (d_begin < text.size() && text[d_begin] == ' ') ++d_begin;
    std::size_t d_end = d_begin;
    while (d_end < text.size() && is_state_char(text[d_end])) ++d_end;
    FsmTransition t{std::string(text.substr(s_begin, s_end - s_begin)),
                    std::string(util::trim(text.substr(pos + 3, close - pos - 3))),
                    std::string(text.substr(d_begin, d_end - d_begin))};
    if (!t.source.empty() && !t.destination.empty()) out.push_back(std::move(t));
    pos = close + 4;
  }
  return out;
}

std::string fsm_pseudocode(const std::vector<FsmTransition>& transitions) {
  std::vector<std::string> lines;
  for (const auto& t : transitions) {
    if (t.condition.empty())
      lines.push_back(fmt::format("if (state == {}) then next_state = {};", t.source, t.destination));
    else
      lines.push_back(
          fmt::format("if (state == {} && {}) then next_state = {};", t.source, t.condition, t.destination));
  }
  return util::join(lines, "\n");
}

FsmRecord analyze_fsm(const ContentBlock& block) {
  FsmRecord r;
  r.transitions = parse_fsm_transitions(block.content);
  if (r.transitions.empty())
    throw Error(ErrorKind::NoTransitionsFound, "no 'S --(cond)--> D' edges in diagram text");
  static const std::regex pair_re(R"(([A-Za-z_]\w*)\s*->\s*([A-Za-z_]\w*))");
  bool in_outputs = false;
  auto add_pairs = [&](const std::string& s) {
    for (auto it = std::sregex_iterator(s.begin(), s.end(), pair_re); it != std::sregex_iterator(); ++it)
      r.outputs.emplace_back((*it)[1].str(), (*it)[2].str());
  };
  for (const auto& raw : util::split_lines(block.content)) {
    std::string line(util::trim(raw));
    if (util::starts_with_ci(line, "states:")) {
      for (const auto& s : util::split(line.substr(7), ','))
        if (auto st = util::trim(s); !st.empty()) r.states.emplace_back(st);
      in_outputs = false;
      continue;
    }
    if (util::starts_with_ci(line, "outputs:")) {
      in_outputs = true;
      add_pairs(line.substr(8));
      continue;
    }
    if (in_outputs && line.starts_with("-") && line.find("--(") == std::string::npos) {
      add_pairs(line.substr(1));
      continue;
    }
    if (!line.starts_with("-")) in_outputs = false;
  }
  if (r.states.empty()) {
    for (const auto& t : r.transitions)
      for (const auto* s : {&t.source, &t.destination})
        if (std::find(r.states.begin(), r.states.end(), *s) == r.states.end()) r.states.push_back(*s);
  }
  r.pseudocode = fsm_pseudocode(r.transitions);
  return r;
}

std::vector<TimingEvent> parse_timing_events(std::string_view text) {
  static const std::regex line_re(R"(^\s*[-*]?\s*`?([A-Za-z_]\w*)`?\s+(rise|rises|fall|falls|descend|descends)\b)",
                                  std::regex::icase);
  static const std::regex event_re(R"(\b(rise|rises|fall|falls|descend|descends)\s+at\s+cycle\s+(\d+))",
                                   std::regex::icase);
  std::vector<TimingEvent> out;
  for (const auto& line : util::split_lines(text)) {
    std::smatch m;
    if (!std::regex_search(line, m, line_re)) continue;
    std::string signal = m[1].str();
    for (auto it = std::sregex_iterator(line.begin(), line.end(), event_re); it != std::sregex_iterator(); ++it) {
      auto word = util::lower((*it)[1].str());
      Edge e = word.starts_with("rise") ? Edge::Rise : Edge::Fall;
      out.push_back({signal, e, std::stoi((*it)[2].str())});
    }
  }
  return out;
}

TemporalConstraint analyze_timing(const std::vector<TimingEvent>& events) {
  std::vector<std::string> order;
  for (const auto& e : events)
    if (std::find(order.begin(), order.end(), e.signal) == order.end()) order.push_back(e.signal);
  std::map<std::string, int> first_rise;
  for (const auto& e : events)
    if (e.edge == Edge::Rise && !first_rise.count(e.signal)) first_rise[e.signal] = e.cycle;
  std::optional<std::string> trigger;
  for (const auto& s : order)
    if (first_rise.count(s) && (!trigger || first_rise[s] < first_rise[*trigger])) trigger = s;
  if (!trigger) throw Error(ErrorKind::NoTriggerEvent, "no rising edge among the timing events");

  TemporalConstraint c;
  c.trigger = *trigger;
  const int t = first_rise[*trigger];
  std::vector<std::string> terms;
  std::vector<std::string> clauses;
  for (const auto& s : order) {
    if (s == *trigger || !first_rise.count(s)) continue;
    const int r = first_rise[s];
    if (r < t) continue;
    ResponseWindow w{s, r - t, r - t + 1, std::nullopt};
    std::optional<int> fall;
    for (const auto& e : events)
      if (e.signal == s && e.edge == Edge::Fall && e.cycle > r && (!fall || e.cycle < *fall)) fall = e.cycle;
    if (fall && *fall - r - 2 >= 0) w.hold = *fall - r - 2;
    std::string term = fmt::format("F[{}:{}] {}", w.lo, w.hi, s);
    std::string clause = fmt::format("{} becomes high within {} cycle{}", s, w.hi, w.hi == 1 ? "" : "s");
    if (w.hold) {
      term += fmt::format(" && G[0:{}] {}", *w.hold, s);
      clause += fmt::format(" and remains high for {} cycle{}", *w.hold + 1, *w.hold == 0 ? "" : "s");
    }
    terms.push_back(term);
    clauses.push_back(clause);
    c.responses.push_back(w);
  }
  if (c.responses.empty())
    throw Error(ErrorKind::NoResponseEvent, fmt::format("no signal rises at or after trigger '{}'", *trigger));
  c.formula = fmt::format("{} => {}", *trigger, util::join(terms, " && "));
  c.prose = fmt::format("After {} is asserted, {}.", *trigger, util::join(clauses, ", and "));
  return c;
}

// ---------------------------------------------------------------------------
// Tables and formulas.

TableRecord analyze_table(const ContentBlock& block) {
  TableRecord t;
  std::size_t line_no = 0;
  for (const auto& raw : util::split_lines(block.content)) {
    ++line_no;
    auto line = util::trim(raw);
    if (line.empty() || line.front() != '|') continue;
    line.remove_prefix(1);
    if (!line.empty() && line.back() == '|') line.remove_suffix(1);
    std::vector<std::string> cells;
    for (const auto& c : util::split(line, '|')) cells.emplace_back(util::trim(c));
    bool separator = std::all_of(cells.begin(), cells.end(), [](const std::string& c) {
      return !c.empty() && c.find_first_not_of("-: ") == std::string::npos;
    });
    if (separator) continue;
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw Error(ErrorKind::RaggedTable,
                  fmt::format("line {} has {} cells, header has {}", line_no, cells.size(), t.header.size()),
                  line_no);
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw Error(ErrorKind::RaggedTable, "no '|'-delimited rows in table block");
  auto has = [&](std::initializer_list<std::string_view> keys) {
    for (const auto& h : t.header) {
      auto l = util::lower(h);
      for (auto k : keys)
        if (l == k) return true;
    }
    return false;
  };
  if (has({"dir", "direction", "width", "port"}))
    t.kind = TableKind::Interface;
  else if (has({"addr", "address", "offset", "reset value", "reset"}))
    t.kind = TableKind::Register;
  else if (has({"mode"}))
    t.kind = TableKind::Mode;
  return t;
}

namespace {

struct RelationToken {
  std::string_view text;
  Relation rel;
};

constexpr RelationToken kRelations[] = {
    {"\xE2\x89\xA4", Relation::Le}, {"\xE2\x89\xA5", Relation::Ge}, {"\\leq", Relation::Le},
    {"\\geq", Relation::Ge},        {"\\le", Relation::Le},         {"\\ge", Relation::Ge},
    {"<=", Relation::Le},           {">=", Relation::Ge},           {"==", Relation::Eq},
    {"=", Relation::Eq},            {"<", Relation::Lt},            {">", Relation::Gt},
};

std::string relation_prose(const std::string& lhs, Relation r, const std::string& rhs) {
  switch (r) {
    case Relation::Eq: return fmt::format("{} equals {}.", lhs, rhs);
    case Relation::Le: return fmt::format("{} is at most {}.", lhs, rhs);
    case Relation::Ge: return fmt::format("{} is at least {}.", lhs, rhs);
    case Relation::Lt: return fmt::format("{} is less than {}.", lhs, rhs);
    case Relation::Gt: return fmt::format("{} is greater than {}.", lhs, rhs);
  }
  return {};
}

std::optional<FormulaRecord> split_relation(std::string_view line) {
  auto text = util::trim(line);
  while (!text.empty() && text.front() == '$') text = util::trim(text.substr(1));
  while (!text.empty() && text.back() == '$') text = util::trim(text.substr(0, text.size() - 1));
  int depth = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (depth != 0) continue;
    if (text.compare(i, 2, "!=") == 0) {
      ++i;
      continue;
    }
    for (const auto& tok : kRelations) {
      if (text.compare(i, tok.text.size(), tok.text) != 0) continue;
      if (tok.text.front() == '\\' && i + tok.text.size() < text.size() &&
          std::isalpha(static_cast<unsigned char>(text[i + tok.text.size()])))
        continue;
      FormulaRecord f;
      f.lhs = std::string(util::trim(text.substr(0, i)));
      f.rhs = std::string(util::trim(text.substr(i + tok.text.size())));
      f.relation = tok.rel;
      if (f.lhs.empty() || f.rhs.empty()) return std::nullopt;
      f.prose = relation_prose(f.lhs, f.relation, f.rhs);
      return f;
    }
  }
  return std::nullopt;
}

}  // namespace

FormulaRecord analyze_formula(const ContentBlock& block) {
  for (const auto& line : util::split_lines(block.content))
    if (auto f = split_relation(line)) return *f;
  throw Error(ErrorKind::NoRelationFound, "no relational expression in formula block");
}

// ---------------------------------------------------------------------------
// Dispatch.

SourceRef make_source_ref(const ContentBlock& block, std::size_t index, std::string_view tag,
                          std::optional<TableKind> table_kind) {
  SourceRef s;
  s.block = index;
  s.page = block.page_number;
  if (tag == "module_info") {
    s.kind = "Text Segment";
  } else if (tag == "fsm") {
    s.kind = "FSM Diagram";
  } else if (tag == "timing") {
    s.kind = "Timing Waveform";
  } else if (tag == "formula") {
    s.kind = "Formal Formula";
  } else {
    switch (table_kind.value_or(TableKind::Other)) {
      case TableKind::Interface: s.kind = "Interface Table"; break;
      case TableKind::Register: s.kind = "Register Table"; break;
      case TableKind::Mode: s.kind = "Mode Table"; break;
      case TableKind::Other: s.kind = "Table"; break;
    }
  }
  if (auto l = block.hint("label"); !l.empty())
    s.label = l;
  else if (auto sec = block.hint("section_id"); !sec.empty())
    s.label = "Section " + sec;
  else
    s.label = block.hint("caption");
  return s;
}

std::vector<Record> analyze_block(const ContentBlock& block, std::size_t index, LlmClient* client) {
  if (!block.classified()) throw Error(ErrorKind::InvalidBlock, "block is not classified", index);
  std::vector<Record> out;
  switch (*block.modality) {
    case Modality::Text: {
      auto info = analyze_text(block, client);
      out.push_back({make_source_ref(block, index, "module_info"), std::move(info)});
      break;
    }
    case Modality::Diagram: {
      auto events = parse_timing_events(block.content);
      if (!events.empty()) {
        out.push_back({make_source_ref(block, index, "timing"), analyze_timing(events)});
      } else if (!parse_fsm_transitions(block.content).empty()) {
        out.push_back({make_source_ref(block, index, "fsm"), analyze_fsm(block)});
      }
      break;
    }
    case Modality::Table: {
      auto t = analyze_table(block);
      auto kind = t.kind;
      out.push_back({make_source_ref(block, index, "table", kind), std::move(t)});
      break;
    }
    case Modality::Formula:
      out.push_back({make_source_ref(block, index, "formula"), analyze_formula(block)});
      break;
  }
  return out;
}

std::vector<Record> analyze_document(const SpecDocument& doc, LlmClient* client) {
  std::vector<Record> out;
  for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
    auto recs = analyze_block(doc.blocks[i], i, client);
    for (auto& r : recs) {
      if (auto* m = std::get_if<ModuleInfo>(&r.body); m && m->name.empty()) m->name = doc.design_name;
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

json body_to_json(const ModuleInfo& m) {
  json ports = json::array();
  for (const auto& p : m.ports)
    ports.push_back({{"name", p.name},
                     {"direction", to_string(p.direction)},
                     {"width", p.width},
                     {"description", p.description}});
  json impl = json::array();
  for (const auto& [k, v] : m.implementation) impl.push_back({k, v});
  return {{"name", m.name},
          {"description", m.description},
          {"ports", ports},
          {"implementation", impl},
          {"example_usage", m.example_usage},
          {"notes", m.notes},
          {"module_interface", m.module_interface}};
}

json body_to_json(const FsmRecord& f) {
  json tr = json::array();
  for (const auto& t : f.transitions)
    tr.push_back({{"source", t.source}, {"condition", t.condition}, {"destination", t.destination}});
  json outs = json::array();
  for (const auto& [s, sig] : f.outputs) outs.push_back({{"state", s}, {"signal", sig}});
  return {{"states", f.states}, {"transitions", tr}, {"outputs", outs}, {"pseudocode", f.pseudocode}};
}

json body_to_json(const TemporalConstraint& c) {
  json resp = json::array();
  for (const auto& w : c.responses) {
    json r = {{"signal", w.signal}, {"lo", w.lo}, {"hi", w.hi}};
    r["hold"] = w.hold ? json(*w.hold) : json(nullptr);
    resp.push_back(r);
  }
  return {{"trigger", c.trigger}, {"formula", c.formula}, {"prose", c.prose}, {"responses", resp}};
}

json body_to_json(const TableRecord& t) {
  return {{"header", t.header}, {"rows", t.rows}, {"inferred_kind", to_string(t.kind)}};
}

json body_to_json(const FormulaRecord& f) {
  return {{"lhs", f.lhs}, {"relation", to_string(f.relation)}, {"rhs", f.rhs}, {"prose", f.prose}};
}

std::string str(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  return it->get<std::string>();
}

}  // namespace

json record_to_json(const Record& r) {
  json j;
  j["kind"] = r.tag();
  j["source"] = {{"block", r.source.block}, {"page", r.source.page}, {"kind", r.source.kind}, {"label", r.source.label}};
  j["data"] = std::visit([](const auto& b) { return body_to_json(b); }, r.body);
  return j;
}

Record record_from_json(const json& j) {
  try {
    Record r;
    const auto& s = j.at("source");
    r.source.block = s.at("block").get<std::size_t>();
    r.source.page = s.at("page").get<int>();
    r.source.kind = str(s, "kind");
    r.source.label = str(s, "label");
    const auto& d = j.at("data");
    auto kind = j.at("kind").get<std::string>();
    if (kind == "module_info") {
      ModuleInfo m;
      m.name = str(d, "name");
      m.description = str(d, "description");
      for (const auto& p : d.value("ports", json::array())) {
        auto dir = parse_direction(p.at("direction").get<std::string>());
        if (!dir) throw Error(ErrorKind::MalformedDocument, "bad port direction");
        m.ports.push_back({p.at("name").get<std::string>(), *dir, p.value("width", 1), str(p, "description")});
      }
      for (const auto& kv : d.value("implementation", json::array()))
        m.implementation.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
      m.example_usage = str(d, "example_usage");
      m.notes = d.value("notes", std::vector<std::string>{});
      m.module_interface = str(d, "module_interface");
      r.body = std::move(m);
    } else if (kind == "fsm") {
      FsmRecord f;
      f.states = d.value("states", std::vector<std::string>{});
      for (const auto& t : d.at("transitions"))
        f.transitions.push_back({str(t, "source"), str(t, "condition"), str(t, "destination")});
      for (const auto& o : d.value("outputs", json::array())) f.outputs.emplace_back(str(o, "state"), str(o, "signal"));
      f.pseudocode = d.contains("pseudocode") ? str(d, "pseudocode") : fsm_pseudocode(f.transitions);
      r.body = std::move(f);
    } else if (kind == "timing") {
      TemporalConstraint c;
      c.trigger = str(d, "trigger");
      c.formula = str(d, "formula");
      c.prose = str(d, "prose");
      for (const auto& w : d.value("responses", json::array())) {
        ResponseWindow rw{str(w, "signal"), w.at("lo").get<int>(), w.at("hi").get<int>(), std::nullopt};
        if (w.contains("hold") && !w["hold"].is_null()) rw.hold = w["hold"].get<int>();
        c.responses.push_back(rw);
      }
      r.body = std::move(c);
    } else if (kind == "table") {
      TableRecord t;
      t.header = d.at("header").get<std::vector<std::string>>();
      t.rows = d.at("rows").get<std::vector<std::vector<std::string>>>();
      auto k = str(d, "inferred_kind");
      t.kind = k == "interface" ? TableKind::Interface
               : k == "register" ? TableKind::Register
               : k == "mode"     ? TableKind::Mode
                                 : TableKind::Other;
      for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (t.rows[i].size() != t.header.size())
          throw Error(ErrorKind::RaggedTable, fmt::format("table row {} has wrong arity", i), i);
      r.body = std::move(t);
    } else if (kind == "formula") {
      FormulaRecord f;
      f.lhs = str(d, "lhs");
      f.rhs = str(d, "rhs");
      auto rel = str(d, "relation");
      bool found = false;
      for (const auto& tok : kRelations)
        if (tok.text == rel) {
          f.relation = tok.rel;
          found = true;
          break;
        }
      if (!found) throw Error(ErrorKind::MalformedDocument, "bad relation '" + rel + "'");
      f.prose = d.contains("prose") ? str(d, "prose") : relation_prose(f.lhs, f.relation, f.rhs);
      r.body = std::move(f);
    } else {
      throw Error(ErrorKind::MalformedDocument, "unknown record kind '" + kind + "'");
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedDocument, std::string("bad record: ") + e.what());
  }
}

std::string write_records(const std::string& design, const std::vector<Record>& records) {
  std::string out =
      json{{"meta", {{"design_name", design}, {"schema", kRecordsSchema}, {"version", kSchemaVersion}}}}.dump() + "\n";
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  return out;
}

std::pair<std::string, std::vector<Record>> parse_records(std::string_view text) {
  std::optional<std::string> design;
  std::vector<Record> records;
  std::size_t line_no = 0;
  for (const auto& line : util::split_lines(text)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::MalformedDocument, fmt::format("records line {}: {}", line_no, e.what()));
    }
    if (!design) {
      if (!j.contains("meta")) throw Error(ErrorKind::MalformedDocument, "records file must start with a meta line");
      design = j["meta"].value("design_name", std::string());
      continue;
    }
    records.push_back(record_from_json(j));
  }
  if (!design) throw Error(ErrorKind::MalformedDocument, "records file is empty");
  return {*design, std::move(records)};
}

}  // namespace specsva
