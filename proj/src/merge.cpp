// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/merge.hpp"

#include <algorithm>
#include <regex>

#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/sva.hpp"
#include "specsva/util.hpp"

namespace specsva {

using nlohmann::json;

namespace {

constexpr std::string_view kSignalsSchema = "specsva/signals";
constexpr int kSchemaVersion = 1;

constexpr TemporalRole kRoleOrder[] = {TemporalRole::Responder, TemporalRole::BoundedDelay, TemporalRole::Stabilizer,
                                       TemporalRole::Initiator, TemporalRole::InvariantHolder};

int kind_rank(const Record& r) {
  switch (r.body.index()) {
    case 0: return 0;  // text
    case 1: return 1;  // fsm
    case 2: return 2;  // timing
    case 4: return 3;  // formula
    default: return 4;  // table
  }
}

std::optional<int> parse_width(std::string_view cell) {
  static const std::regex range_re(R"(^\[\s*(\d+)\s*:\s*(\d+)\s*\]$)");
  static const std::regex num_re(R"(^(\d+)(\s*[- ]?\s*bits?)?$)", std::regex::icase);
  std::string c(util::trim(cell));
  std::smatch m;
  if (std::regex_match(c, m, range_re)) return std::abs(std::stoi(m[1].str()) - std::stoi(m[2].str())) + 1;
  if (std::regex_match(c, m, num_re)) return std::stoi(m[1].str());
  return std::nullopt;
}

std::optional<std::size_t> table_row(const TableRecord& t, const std::string& name) {
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    auto n = t.cell(i, {"name", "signal", "port", "field"});
    if (util::trim(n) == name) return i;
    // Width-annotated names such as "data[7:0]".
    auto br = n.find('[');
    if (br != std::string::npos && util::trim(n.substr(0, br)) == name) return i;
  }
  return std::nullopt;
}

bool fsm_mentions(const FsmRecord& f, const std::string& name) {
  for (const auto& [state, sig] : f.outputs)
    if (sig == name) return true;
  for (const auto& t : f.transitions)
    if (util::mentions_identifier(t.condition, name)) return true;
  return false;
}

const ResponseWindow* response_for(const TemporalConstraint& c, const std::string& name) {
  for (const auto& w : c.responses)
    if (w.signal == name) return &w;
  return nullptr;
}

bool mentions(const Record& r, const std::string& name) {
  if (const auto* m = std::get_if<ModuleInfo>(&r.body)) {
    for (const auto& p : m->ports)
      if (p.name == name) return true;
    for (const auto& n : m->notes)
      if (util::mentions_identifier(n, name)) return true;
    return false;
  }
  if (const auto* f = std::get_if<FsmRecord>(&r.body)) return fsm_mentions(*f, name);
  if (const auto* c = std::get_if<TemporalConstraint>(&r.body))
    return c->trigger == name || response_for(*c, name) != nullptr;
  if (const auto* t = std::get_if<TableRecord>(&r.body)) return table_row(*t, name).has_value();
  const auto& f = std::get<FormulaRecord>(r.body);
  return util::mentions_identifier(f.lhs, name) || util::mentions_identifier(f.rhs, name);
}

std::string response_formula(const ResponseWindow& w) {
  std::string s = fmt::format("F[{}:{}] {}", w.lo, w.hi, w.signal);
  if (w.hold) s += fmt::format(" && G[0:{}] {}", *w.hold, w.signal);
  return s;
}

void append_unique(std::string& acc, const std::string& text, std::string_view sep) {
  auto t = std::string(util::trim(text));
  if (t.empty()) return;
  for (const auto& part : util::split(acc, sep.front()))
    if (util::trim(part) == t) return;
  if (!acc.empty()) acc += sep;
  acc += t;
}

}  // namespace

std::string_view to_string(TemporalRole r) {
  switch (r) {
    case TemporalRole::Responder: return "responder";
    case TemporalRole::BoundedDelay: return "bounded-delay";
    case TemporalRole::Stabilizer: return "stabilizer";
    case TemporalRole::Initiator: return "initiator";
    case TemporalRole::InvariantHolder: return "invariant-holder";
  }
  return "responder";
}

std::optional<TemporalRole> parse_role(std::string_view text) {
  for (auto r : kRoleOrder)
    if (util::iequals(util::trim(text), to_string(r))) return r;
  return std::nullopt;
}

bool SignalSpec::has_role(TemporalRole r) const { return std::find(roles.begin(), roles.end(), r) != roles.end(); }

std::vector<std::string> signal_names(const std::vector<Record>& records) {
  std::vector<std::string> out;
  auto add = [&](const std::string& n) {
    if (!n.empty() && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  };
  for (const auto& r : records) {
    if (const auto* m = std::get_if<ModuleInfo>(&r.body)) {
      for (const auto& p : m->ports) add(p.name);
    } else if (const auto* f = std::get_if<FsmRecord>(&r.body)) {
      for (const auto& [state, sig] : f->outputs) add(sig);
    } else if (const auto* c = std::get_if<TemporalConstraint>(&r.body)) {
      add(c->trigger);
      for (const auto& w : c->responses) add(w.signal);
    } else if (const auto* t = std::get_if<TableRecord>(&r.body)) {
      if (t->kind != TableKind::Interface) continue;
      for (std::size_t i = 0; i < t->rows.size(); ++i) {
        auto n = t->cell(i, {"name", "signal", "port"});
        if (auto br = n.find('['); br != std::string::npos) n = n.substr(0, br);
        add(std::string(util::trim(n)));
      }
    }
  }
  return out;
}

SignalSpec merge_signal(const std::string& name, const std::vector<Record>& records) {
  std::vector<const Record*> used;
  for (const auto& r : records)
    if (mentions(r, name)) used.push_back(&r);
  if (used.empty()) throw Error(ErrorKind::UnknownSignal, fmt::format("no record mentions signal '{}'", name));
  std::stable_sort(used.begin(), used.end(), [](const Record* a, const Record* b) {
    return std::pair(kind_rank(*a), a->source.block) < std::pair(kind_rank(*b), b->source.block);
  });

  SignalSpec s;
  s.name = name;
  std::optional<int> width;
  std::string width_origin;
  auto note = [&](const char* field, std::size_t ref) {
    auto& v = s.field_sources[field];
    if (std::find(v.begin(), v.end(), ref) == v.end()) v.push_back(ref);
  };
  auto set_width = [&](int w, std::size_t ref, const SourceRef& src) {
    if (width && *width != w)
      throw Error(ErrorKind::ConflictError, fmt::format("signal '{}': width {} from {} but {} from {}", name, *width,
                                                        width_origin, w, src.render()));
    width = w;
    width_origin = src.render();
    note("width", ref);
  };

  std::string table_direction;
  std::string text_direction;
  std::vector<std::size_t> table_dir_refs;
  std::vector<std::size_t> text_dir_refs;
  std::vector<std::string> fsm_controls;
  std::string timing_prose;
  std::optional<std::size_t> timing_prose_ref;

  for (const Record* r : used) {
    std::size_t ref = s.traceability.size();
    s.traceability.push_back(r->source);
    if (const auto* m = std::get_if<ModuleInfo>(&r->body)) {
      for (const auto& p : m->ports) {
        if (p.name != name) continue;
        set_width(p.width, ref, r->source);
        text_direction = std::string(to_string(p.direction));
        text_dir_refs.push_back(ref);
        if (!p.description.empty()) {
          append_unique(s.description, p.description, "; ");
          note("description", ref);
        }
      }
      for (const auto& n : m->notes) {
        if (!util::mentions_identifier(n, name)) continue;
        if (s.natural_language.empty()) {
          s.natural_language = n;
          note("natural_language", ref);
        }
      }
    } else if (const auto* f = std::get_if<FsmRecord>(&r->body)) {
      std::vector<std::string> states;
      for (const auto& [st, sig] : f->outputs)
        if (sig == name) states.push_back(st);
      for (const auto& t : f->transitions) {
        if (std::find(states.begin(), states.end(), t.destination) == states.end()) continue;
        s.fsm_transitions.push_back(t);
        fsm_controls.push_back(t.condition.empty() ? fmt::format("state == {}", t.source)
                                                   : fmt::format("state == {} && {}", t.source, t.condition));
        note("fsm_transitions", ref);
        note("control_logic", ref);
      }
    } else if (const auto* c = std::get_if<TemporalConstraint>(&r->body)) {
      if (const auto* w = response_for(*c, name); w && s.temporal_logic.empty()) {
        s.temporal_logic = response_formula(*w);
        auto sva = tl_to_sva(parse_temporal(c->trigger + " => " + s.temporal_logic));
        s.timing_constraint = render_sequence(sva.consequent);
        timing_prose = fmt::format("After {} is asserted, {} becomes high within {} cycle{}", c->trigger, name, w->hi,
                                   w->hi == 1 ? "" : "s");
        if (w->hold) timing_prose += fmt::format(" and remains high for {} cycle{}", *w->hold + 1, *w->hold ? "s" : "");
        timing_prose += ".";
        timing_prose_ref = ref;
        note("temporal_logic", ref);
        note("timing_constraint", ref);
        note("roles", ref);
      }
      if (c->trigger == name) note("roles", ref);
    } else if (const auto* t = std::get_if<TableRecord>(&r->body)) {
      auto row = *table_row(*t, name);
      auto w = t->cell(row, {"width", "bits", "size"});
      if (!w.empty()) {
        auto parsed = parse_width(w);
        if (!parsed || *parsed < 1)
          throw Error(ErrorKind::ConflictError, fmt::format("signal '{}': unreadable width '{}'", name, w));
        set_width(*parsed, ref, r->source);
      } else if (auto n = t->cell(row, {"name", "signal", "port", "field"}); n.find('[') != std::string::npos) {
        if (auto parsed = parse_width(n.substr(n.find('[')))) set_width(*parsed, ref, r->source);
      }
      if (auto d = t->cell(row, {"direction", "dir"}); !d.empty()) {
        if (auto pd = parse_direction(d)) {
          table_direction = std::string(to_string(*pd));
          table_dir_refs.push_back(ref);
        }
      }
      if (auto d = t->cell(row, {"default", "default value", "reset value", "reset"}); !d.empty()) {
        s.default_value = d;
        note("default_value", ref);
      }
      if (auto d = t->cell(row, {"category", "type", "class"}); !d.empty()) {
        s.category = d;
        note("category", ref);
      }
      if (auto d = t->cell(row, {"description", "desc", "function"}); !d.empty()) {
        append_unique(s.description, d, "; ");
        note("description", ref);
      }
    } else {
      const auto& f = std::get<FormulaRecord>(r->body);
      if (util::trim(f.lhs) == name && f.relation == Relation::Eq) {
        if (s.invariant.empty()) {
          s.invariant = fmt::format("{} == ({})", name, util::trim(f.rhs));
          try {
            s.invariant = render_expr(parse_expression_text(s.invariant));
          } catch (const Error&) {
          }
        }
        note("roles", ref);
        note("invariant", ref);
      }
      note("formula", ref);
    }
  }

  s.width = width.value_or(1);
  if (!table_direction.empty()) {
    s.direction = table_direction;
    for (auto ref : table_dir_refs) note("direction", ref);
  } else if (!text_direction.empty()) {
    s.direction = text_direction;
    for (auto ref : text_dir_refs) note("direction", ref);
  }
  if (fsm_controls.size() == 1) {
    s.control_logic = fsm_controls.front();
  } else if (fsm_controls.size() > 1) {
    for (auto& c : fsm_controls) c = "(" + c + ")";
    s.control_logic = util::join(fsm_controls, " || ");
  }
  if (s.natural_language.empty() && timing_prose_ref) {
    s.natural_language = timing_prose;
    note("natural_language", *timing_prose_ref);
  }

  // Roles.
  bool responder = !s.temporal_logic.empty();
  bool initiator = false;
  bool invariant = false;
  for (const Record* r : used) {
    if (const auto* c = std::get_if<TemporalConstraint>(&r->body); c && c->trigger == name) initiator = true;
    if (const auto* f = std::get_if<FormulaRecord>(&r->body);
        f && util::trim(f->lhs) == name && f->relation == Relation::Eq)
      invariant = true;
  }
  bool stabilizer = false;
  if (!s.timing_constraint.empty()) {
    auto seq = parse_sequence_text(s.timing_constraint);
    for (const auto& t : seq.terms)
      if (t.repeat > 1) stabilizer = true;
  }
  for (auto role : kRoleOrder) {
    bool on = (role == TemporalRole::Responder && responder) || (role == TemporalRole::BoundedDelay && responder) ||
              (role == TemporalRole::Stabilizer && stabilizer) || (role == TemporalRole::Initiator && initiator) ||
              (role == TemporalRole::InvariantHolder && invariant);
    if (on) s.roles.push_back(role);
  }

  if (!s.control_logic.empty() && !s.timing_constraint.empty()) {
    s.intent = derive_intent(s);
    for (const char* f : {"control_logic", "timing_constraint"})
      for (auto ref : s.field_sources[f]) note("intent", ref);
  }
  return s;
}

std::vector<SignalSpec> merge_all(const std::vector<Record>& records) {
  std::vector<SignalSpec> out;
  for (const auto& n : signal_names(records)) out.push_back(merge_signal(n, records));
  return out;
}

IntentTriplet derive_intent(const SignalSpec& spec) {
  if (spec.control_logic.empty())
    throw Error(ErrorKind::InsufficientSemantics, fmt::format("signal '{}' has no control logic", spec.name));
  if (spec.timing_constraint.empty())
    throw Error(ErrorKind::InsufficientSemantics, fmt::format("signal '{}' has no timing constraint", spec.name));
  IntentTriplet t;
  t.precondition = spec.control_logic;
  t.timing = spec.timing_constraint;
  auto dflt = std::string(util::trim(spec.default_value));
  if (spec.width == 1) {
    bool active_low = dflt == "1" || dflt == "1'b1" || spec.name.ends_with("_n");
    t.consequence = fmt::format("{} == {}", spec.name, active_low ? 0 : 1);
  } else {
    t.consequence = fmt::format("{} != {}", spec.name, dflt.empty() ? "0" : dflt);
  }
  return t;
}

std::string render_signal_spec(const SignalSpec& s) {
  std::string out = fmt::format("Signal: {}\nATTRIBUTES:\n", s.name);
  out += fmt::format("- Name: {}\n- Width: {}\n- Direction: {}\n- Default Value: {}\n- Category: {}\n", s.name,
                     s.width, s.direction, s.default_value, s.category);
  if (!s.description.empty()) out += fmt::format("- Description: {}\n", s.description);
  out += "BEHAVIORAL SEMANTICS:\n";
  out += fmt::format("- Control Logic: {}\n", s.control_logic);
  for (const auto& t : s.fsm_transitions)
    out += fmt::format("- FSM Transition: {} --({})--> {}\n", t.source, t.condition, t.destination);
  out += fmt::format("- Timing Constraint: {}\n- Temporal Logic: {}\n- Natural Language: \"{}\"\n",
                     s.timing_constraint, s.temporal_logic, s.natural_language);
  if (!s.invariant.empty()) out += fmt::format("- Invariant: {}\n", s.invariant);
  out += "TEMPORAL ROLES:\n";
  for (auto r : s.roles) out += fmt::format("- {}\n", to_string(r));
  out += "INTENT CANDIDATE TRIPLET:\n";
  if (s.intent)
    out += fmt::format("- Precondition: {}\n- Consequence: {}\n- Timing: {}\n", s.intent->precondition,
                       s.intent->consequence, s.intent->timing);
  else
    out += "- (none)\n";
  out += "SOURCE TRACEABILITY:\n";
  for (const auto& ref : s.traceability) out += "- " + ref.render() + "\n";
  return out;
}

json signal_to_json(const SignalSpec& s) {
  json fsm = json::array();
  for (const auto& t : s.fsm_transitions)
    fsm.push_back({{"source", t.source}, {"condition", t.condition}, {"destination", t.destination}});
  json roles = json::array();
  for (auto r : s.roles) roles.push_back(to_string(r));
  json trace = json::array();
  for (const auto& r : s.traceability)
    trace.push_back({{"block", r.block}, {"page", r.page}, {"kind", r.kind}, {"label", r.label}});
  json j = {{"name", s.name},
            {"width", s.width},
            {"direction", s.direction},
            {"default_value", s.default_value},
            {"category", s.category},
            {"description", s.description},
            {"control_logic", s.control_logic},
            {"fsm_transitions", fsm},
            {"timing_constraint", s.timing_constraint},
            {"temporal_logic", s.temporal_logic},
            {"natural_language", s.natural_language},
            {"invariant", s.invariant},
            {"temporal_roles", roles},
            {"traceability", trace},
            {"field_sources", s.field_sources}};
  j["intent"] = s.intent ? json{{"precondition", s.intent->precondition},
                                {"consequence", s.intent->consequence},
                                {"timing", s.intent->timing}}
                         : json(nullptr);
  return j;
}

SignalSpec signal_from_json(const json& j) {
  try {
    SignalSpec s;
    s.name = j.at("name").get<std::string>();
    s.width = j.at("width").get<int>();
    s.direction = j.value("direction", "");
    s.default_value = j.value("default_value", "");
    s.category = j.value("category", "");
    s.description = j.value("description", "");
    s.control_logic = j.value("control_logic", "");
    for (const auto& t : j.value("fsm_transitions", json::array()))
      s.fsm_transitions.push_back({t.at("source").get<std::string>(), t.at("condition").get<std::string>(),
                                   t.at("destination").get<std::string>()});
    s.timing_constraint = j.value("timing_constraint", "");
    s.temporal_logic = j.value("temporal_logic", "");
    s.natural_language = j.value("natural_language", "");
    s.invariant = j.value("invariant", "");
    for (const auto& r : j.value("temporal_roles", json::array())) {
      auto role = parse_role(r.get<std::string>());
      if (!role) throw Error(ErrorKind::MalformedDocument, "unknown temporal role " + r.dump());
      s.roles.push_back(*role);
    }
    for (const auto& r : j.value("traceability", json::array()))
      s.traceability.push_back({r.at("block").get<std::size_t>(), r.at("page").get<int>(),
                                r.at("kind").get<std::string>(), r.value("label", "")});
    s.field_sources = j.value("field_sources", std::map<std::string, std::vector<std::size_t>>{});
    if (auto it = j.find("intent"); it != j.end() && !it->is_null())
      s.intent = IntentTriplet{it->at("precondition").get<std::string>(), it->at("consequence").get<std::string>(),
                               it->at("timing").get<std::string>()};
    if (s.width < 1) throw Error(ErrorKind::MalformedDocument, "signal '" + s.name + "' has width < 1");
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedDocument, std::string("bad signal spec: ") + e.what());
  }
}

std::string write_signals(const std::string& design, const std::vector<SignalSpec>& signals) {
  json arr = json::array();
  for (const auto& s : signals) arr.push_back(signal_to_json(s));
  json doc = {{"schema", kSignalsSchema}, {"version", kSchemaVersion}, {"design", design}, {"signals", arr}};
  return doc.dump(2) + "\n";
}

std::pair<std::string, std::vector<SignalSpec>> parse_signals(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedDocument, std::string("signals file: ") + e.what());
  }
  if (doc.value("schema", "") != kSignalsSchema)
    throw Error(ErrorKind::MalformedDocument, "signals file has wrong schema tag");
  std::vector<SignalSpec> out;
  for (const auto& s : doc.at("signals")) out.push_back(signal_from_json(s));
  return {doc.value("design", ""), std::move(out)};
}

}  // namespace specsva
