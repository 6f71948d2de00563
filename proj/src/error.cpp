// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/error.hpp"

#include <fmt/format.h>

namespace specsva {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::InvalidBlock: return "InvalidBlock";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::UnparseableResponse: return "UnparseableResponse";
    case ErrorKind::NoTransitionsFound: return "NoTransitionsFound";
    case ErrorKind::NoTriggerEvent: return "NoTriggerEvent";
    case ErrorKind::NoResponseEvent: return "NoResponseEvent";
    case ErrorKind::RaggedTable: return "RaggedTable";
    case ErrorKind::NoRelationFound: return "NoRelationFound";
    case ErrorKind::UnknownSignal: return "UnknownSignal";
    case ErrorKind::ConflictError: return "ConflictError";
    case ErrorKind::InsufficientSemantics: return "InsufficientSemantics";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnsupportedShape: return "UnsupportedShape";
    case ErrorKind::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorKind::InvalidDesign: return "InvalidDesign";
    case ErrorKind::NoMutationSites: return "NoMutationSites";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NonGenerableSignal: return "NonGenerableSignal";
    case ErrorKind::UnboundTiming: return "UnboundTiming";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::EmptyAssertionSet: return "EmptyAssertionSet";
    case ErrorKind::EmptyMutantSet: return "EmptyMutantSet";
    case ErrorKind::MissingLabel: return "MissingLabel";
    case ErrorKind::UnknownMutantId: return "UnknownMutantId";
    case ErrorKind::HttpError: return "HttpError";
    case ErrorKind::InvalidRequest: return "InvalidRequest";
    case ErrorKind::CacheMiss: return "CacheMiss";
    case ErrorKind::FixtureMiss: return "FixtureMiss";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::StageError: return "StageError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> index, std::string tag)
    : std::runtime_error(fmt::format("{}: {}", to_string(kind), message)),
      kind_(kind),
      index_(index),
      tag_(std::move(tag)) {}

}  // namespace specsva
