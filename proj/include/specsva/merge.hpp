// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Per-signal aggregation of analyzer records into a unified SignalSpec.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specsva/analyzers.hpp"

namespace specsva {

enum class TemporalRole { Responder, BoundedDelay, Stabilizer, Initiator, InvariantHolder };

std::string_view to_string(TemporalRole r);
std::optional<TemporalRole> parse_role(std::string_view text);

struct IntentTriplet {
  std::string precondition;
  std::string consequence;
  std::string timing;
  friend bool operator==(const IntentTriplet&, const IntentTriplet&) = default;
};

struct SignalSpec {
  std::string name;
  int width = 1;
  std::string direction;
  std::string default_value;
  std::string category;
  std::string description;
  std::string control_logic;
  std::vector<FsmTransition> fsm_transitions;
  std::string timing_constraint;
  std::string temporal_logic;
  std::string natural_language;
  /// "<name> == <rhs>" from an equation with the signal on the left.
  std::string invariant;
  std::vector<TemporalRole> roles;  // fixed order: responder, bounded-delay, stabilizer, initiator, invariant-holder
  std::optional<IntentTriplet> intent;
  std::vector<SourceRef> traceability;
  /// Field name -> indices into `traceability`.
  std::map<std::string, std::vector<std::size_t>> field_sources;

  /// Has a triplet, or holds an invariant equation.
  bool generable() const { return intent.has_value() || !invariant.empty(); }
  bool has_role(TemporalRole r) const;
  friend bool operator==(const SignalSpec&, const SignalSpec&) = default;
};

/// Every signal named by some record, in first-mention order.
std::vector<std::string> signal_names(const std::vector<Record>& records);

/// Throws UnknownSignal, ConflictError.
SignalSpec merge_signal(const std::string& name, const std::vector<Record>& records);
std::vector<SignalSpec> merge_all(const std::vector<Record>& records);

/// Throws InsufficientSemantics.
IntentTriplet derive_intent(const SignalSpec& spec);

/// Multi-line human-readable form (attributes, behavior, roles, triplet,
/// traceability).
std::string render_signal_spec(const SignalSpec& spec);

nlohmann::json signal_to_json(const SignalSpec& s);
SignalSpec signal_from_json(const nlohmann::json& j);
std::string write_signals(const std::string& design, const std::vector<SignalSpec>& signals);
std::pair<std::string, std::vector<SignalSpec>> parse_signals(std::string_view text);

}  // namespace specsva
