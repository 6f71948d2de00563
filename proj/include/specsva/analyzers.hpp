// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Per-modality extraction of structured records from classified blocks.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "specsva/llm_client.hpp"
#include "specsva/spec_ir.hpp"

namespace specsva {

enum class PortDirection { Input, Output, Inout };

std::string_view to_string(PortDirection d);
std::optional<PortDirection> parse_direction(std::string_view text);

struct PortDecl {
  std::string name;
  PortDirection direction = PortDirection::Input;
  int width = 1;
  std::string description;
  friend bool operator==(const PortDecl&, const PortDecl&) = default;
};

struct ModuleInfo {
  std::string name;
  std::string description;
  std::vector<PortDecl> ports;
  /// Ordered, open-ended (reset, accumulation, output_behavior, ...).
  std::vector<std::pair<std::string, std::string>> implementation;
  std::string example_usage;
  std::vector<std::string> notes;
  std::string module_interface;
  friend bool operator==(const ModuleInfo&, const ModuleInfo&) = default;
};

struct FsmTransition {
  std::string source;
  std::string condition;
  std::string destination;
  friend bool operator==(const FsmTransition&, const FsmTransition&) = default;
};

struct FsmRecord {
  std::vector<std::string> states;
  std::vector<FsmTransition> transitions;
  /// (state, signal) pairs from "Outputs: STATE -> sig" lines.
  std::vector<std::pair<std::string, std::string>> outputs;
  std::string pseudocode;
  friend bool operator==(const FsmRecord&, const FsmRecord&) = default;
};

enum class Edge { Rise, Fall };

struct TimingEvent {
  std::string signal;
  Edge edge = Edge::Rise;
  int cycle = 0;
  friend bool operator==(const TimingEvent&, const TimingEvent&) = default;
};

struct ResponseWindow {
  std::string signal;
  int lo = 0;
  int hi = 0;
  std::optional<int> hold;  // G[0:hold]
  friend bool operator==(const ResponseWindow&, const ResponseWindow&) = default;
};

struct TemporalConstraint {
  std::string trigger;
  std::string formula;
  std::string prose;
  std::vector<ResponseWindow> responses;
  friend bool operator==(const TemporalConstraint&, const TemporalConstraint&) = default;
};

enum class TableKind { Interface, Register, Mode, Other };

std::string_view to_string(TableKind k);

struct TableRecord {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  TableKind kind = TableKind::Other;
  /// Cell of `row` under the first header matching one of `names`
  /// (case-insensitive); empty when absent.
  std::string cell(std::size_t row, std::initializer_list<std::string_view> names) const;
  friend bool operator==(const TableRecord&, const TableRecord&) = default;
};

enum class Relation { Eq, Le, Ge, Lt, Gt };

std::string_view to_string(Relation r);

struct FormulaRecord {
  std::string lhs;
  Relation relation = Relation::Eq;
  std::string rhs;
  std::string prose;
  friend bool operator==(const FormulaRecord&, const FormulaRecord&) = default;
};

struct SourceRef {
  std::size_t block = 0;
  int page = 1;
  std::string kind;   // "Text Segment", "FSM Diagram", ...
  std::string label;  // "Section 2.1", "Figure 3", ...
  std::string render() const;
  friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

using RecordBody = std::variant<ModuleInfo, FsmRecord, TemporalConstraint, TableRecord, FormulaRecord>;

struct Record {
  SourceRef source;
  RecordBody body;
  std::string_view tag() const;  // module_info / fsm / timing / table / formula
  friend bool operator==(const Record&, const Record&) = default;
};

// Text ----------------------------------------------------------------------

ChatRequest build_text_prompt(const ContentBlock& block);
/// YAML response to ModuleInfo. Throws UnparseableResponse.
ModuleInfo parse_module_info(std::string_view response);
/// Port phrases such as "output `ack` (1 bit) acknowledges transfer".
ModuleInfo extract_module_info_rules(const ContentBlock& block);
/// One retry on an unparseable response. A mock client without a matching
/// fixture falls back to the rule extractor.
ModuleInfo analyze_text(const ContentBlock& block, LlmClient* client);

// Diagrams ------------------------------------------------------------------

std::vector<FsmTransition> parse_fsm_transitions(std::string_view text);
std::string fsm_pseudocode(const std::vector<FsmTransition>& transitions);
/// Throws NoTransitionsFound.
FsmRecord analyze_fsm(const ContentBlock& block);

/// Lines like "irq_flag rise at cycle 44, descend at cycle 51".
std::vector<TimingEvent> parse_timing_events(std::string_view text);
/// Throws NoTriggerEvent, NoResponseEvent.
TemporalConstraint analyze_timing(const std::vector<TimingEvent>& events);

// Tables and formulas -------------------------------------------------------

/// Throws RaggedTable.
TableRecord analyze_table(const ContentBlock& block);
/// Throws NoRelationFound.
FormulaRecord analyze_formula(const ContentBlock& block);

// Dispatch ------------------------------------------------------------------

SourceRef make_source_ref(const ContentBlock& block, std::size_t index, std::string_view tag,
                          std::optional<TableKind> table_kind = std::nullopt);

/// Records for one classified block (possibly none).
std::vector<Record> analyze_block(const ContentBlock& block, std::size_t index, LlmClient* client);
std::vector<Record> analyze_document(const SpecDocument& doc, LlmClient* client);

nlohmann::json record_to_json(const Record& r);
Record record_from_json(const nlohmann::json& j);
/// JSON lines behind a meta line carrying the schema tag and design name.
std::string write_records(const std::string& design, const std::vector<Record>& records);
std::pair<std::string, std::vector<Record>> parse_records(std::string_view text);

}  // namespace specsva
