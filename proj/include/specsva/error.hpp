// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace specsva {

enum class ErrorKind {
  MalformedDocument,
  InvalidBlock,
  EmptyInput,
  UnparseableResponse,
  NoTransitionsFound,
  NoTriggerEvent,
  NoResponseEvent,
  RaggedTable,
  NoRelationFound,
  UnknownSignal,
  ConflictError,
  InsufficientSemantics,
  SyntaxError,
  UnsupportedShape,
  UnsupportedConstruct,
  InvalidDesign,
  NoMutationSites,
  BudgetExceeded,
  IoError,
  NonGenerableSignal,
  UnboundTiming,
  EmptyCorpus,
  IndexOutOfRange,
  EmptyAssertionSet,
  EmptyMutantSet,
  MissingLabel,
  UnknownMutantId,
  HttpError,
  InvalidRequest,
  CacheMiss,
  FixtureMiss,
  ConfigError,
  StageError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library. `index()` carries the block index,
/// source offset or HTTP status where the kind has one; `tag()` carries the
/// LLM request tag or pipeline stage name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> index = std::nullopt, std::string tag = {});

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> index() const noexcept { return index_; }
  const std::string& tag() const noexcept { return tag_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
  std::string tag_;
};

}  // namespace specsva
