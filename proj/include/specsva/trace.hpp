// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specsva {

/// Per-signal value sequences of uniform length. Cycle 0 is the first
/// sampled clock edge.
class Trace {
 public:
  Trace() = default;
  Trace(std::vector<std::string> names, std::vector<int> widths, std::size_t length);

  std::size_t length() const { return length_; }
  std::size_t signal_count() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<int>& widths() const { return widths_; }
  std::optional<int> index_of(std::string_view name) const;

  std::uint64_t at(int signal, std::size_t cycle) const {
    return columns_[static_cast<std::size_t>(signal)][cycle];
  }
  void set(int signal, std::size_t cycle, std::uint64_t value);
  /// Convenience for tests: set by name, throws UnknownSignal.
  void set(std::string_view name, std::size_t cycle, std::uint64_t value);
  std::uint64_t value(std::string_view name, std::size_t cycle) const;

  /// Keeps cycles [0, length).
  void truncate(std::size_t length);

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<int> widths_;
  std::vector<std::vector<std::uint64_t>> columns_;
  std::size_t length_ = 0;
};

/// VCD-lite text:
///   signals rst:1 en:1 count:4
///   1 0 0000
///   0 1 0000
/// One row per cycle, binary values padded to each signal's width.
std::string write_trace(const Trace& trace);
Trace parse_trace(std::string_view text);

}  // namespace specsva
