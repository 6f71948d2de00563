// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/trace.hpp"

#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/expr.hpp"
#include "specsva/util.hpp"

namespace specsva {

Trace::Trace(std::vector<std::string> names, std::vector<int> widths, std::size_t length)
    : names_(std::move(names)), widths_(std::move(widths)), length_(length) {
  if (names_.size() != widths_.size())
    throw Error(ErrorKind::InvalidDesign, "trace names/widths size mismatch");
  columns_.assign(names_.size(), std::vector<std::uint64_t>(length_, 0));
}

std::optional<int> Trace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

void Trace::set(int signal, std::size_t cycle, std::uint64_t value) {
  auto s = static_cast<std::size_t>(signal);
  columns_[s][cycle] = value & width_mask(widths_[s]);
}

void Trace::set(std::string_view name, std::size_t cycle, std::uint64_t value) {
  auto idx = index_of(name);
  if (!idx) throw Error(ErrorKind::UnknownSignal, fmt::format("trace has no signal '{}'", name));
  set(*idx, cycle, value);
}

std::uint64_t Trace::value(std::string_view name, std::size_t cycle) const {
  auto idx = index_of(name);
  if (!idx) throw Error(ErrorKind::UnknownSignal, fmt::format("trace has no signal '{}'", name));
  return at(*idx, cycle);
}

void Trace::truncate(std::size_t length) {
  if (length >= length_) return;
  for (auto& col : columns_) col.resize(length);
  length_ = length;
}

std::string write_trace(const Trace& trace) {
  std::string out = "signals";
  for (std::size_t i = 0; i < trace.signal_count(); ++i)
    out += fmt::format(" {}:{}", trace.names()[i], trace.widths()[i]);
  out += "\n";
  for (std::size_t t = 0; t < trace.length(); ++t) {
    for (std::size_t i = 0; i < trace.signal_count(); ++i) {
      if (i) out += ' ';
      auto v = trace.at(static_cast<int>(i), t);
      for (int b = trace.widths()[i] - 1; b >= 0; --b) out += ((v >> b) & 1u) ? '1' : '0';
    }
    out += "\n";
  }
  return out;
}

Trace parse_trace(std::string_view text) {
  std::vector<std::string> names;
  std::vector<int> widths;
  std::vector<std::vector<std::string>> rows;
  bool header = false;
  for (const auto& raw : util::split_lines(text)) {
    auto line = util::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    for (auto& f : util::split(line, ' '))
      if (!util::trim(f).empty()) fields.emplace_back(util::trim(f));
    if (!header) {
      if (fields.empty() || fields[0] != "signals")
        throw Error(ErrorKind::SyntaxError, "trace must start with a 'signals' header");
      for (std::size_t i = 1; i < fields.size(); ++i) {
        auto colon = fields[i].find(':');
        names.push_back(fields[i].substr(0, colon));
        int w = 1;
        if (colon != std::string::npos) {
          try {
            w = std::stoi(fields[i].substr(colon + 1));
          } catch (const std::exception&) {
            throw Error(ErrorKind::SyntaxError, "bad width in trace header: " + fields[i]);
          }
        }
        if (w < 1 || w > 64) throw Error(ErrorKind::SyntaxError, "width out of range: " + fields[i]);
        widths.push_back(w);
      }
      header = true;
      continue;
    }
    if (fields.size() != names.size())
      throw Error(ErrorKind::SyntaxError,
                  fmt::format("trace row {} has {} values, expected {}", rows.size(), fields.size(),
                              names.size()));
    rows.push_back(std::move(fields));
  }
  if (!header) throw Error(ErrorKind::SyntaxError, "empty trace");
  if (rows.empty()) throw Error(ErrorKind::SyntaxError, "trace has no cycles");
  Trace trace(names, widths, rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::uint64_t v = 0;
      for (char c : rows[t][i]) {
        if (c != '0' && c != '1')
          throw Error(ErrorKind::SyntaxError, fmt::format("non-binary value '{}'", rows[t][i]));
        v = (v << 1) | static_cast<std::uint64_t>(c - '0');
      }
      trace.set(static_cast<int>(i), t, v);
    }
  }
  return trace;
}

}  // namespace specsva
