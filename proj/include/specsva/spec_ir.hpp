// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Block-level intermediate representation of a specification document.
//
// A document is an ordered stream of content blocks as produced by an
// upstream layout analyzer. Blocks may be stored unclassified; the
// classification stage fills in modality and semantic category.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace specsva {

enum class Modality { Text, Table, Formula, Diagram };

std::string_view to_string(Modality m);
std::optional<Modality> parse_modality(std::string_view text);

class SemanticCategory {
 public:
  enum class Kind {
    Architecture,
    ModuleInterface,
    TimingBehavior,
    ControlLogic,
    ResetBehavior,
    ConfigurationInfo,
    Other,
  };

  SemanticCategory() = default;
  explicit SemanticCategory(Kind kind) : kind_(kind) {}
  static SemanticCategory other(std::string label);

  /// Case-insensitive match against the known names; anything else becomes
  /// Other(text) with surrounding whitespace trimmed.
  static SemanticCategory from_text(std::string_view text);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  /// Display name, e.g. "Timing Behavior"; Other yields its label.
  std::string name() const;

  friend bool operator==(const SemanticCategory&, const SemanticCategory&) = default;

 private:
  Kind kind_ = Kind::Architecture;
  std::string label_;
};

struct BoundingBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool valid() const;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ContentBlock {
  std::string content;
  std::optional<Modality> modality;
  std::optional<SemanticCategory> semantic_category;
  int page_number = 1;
  std::optional<BoundingBox> bounding_box;
  std::map<std::string, std::string> layout_hints;

  bool classified() const { return modality && semantic_category; }
  std::string hint(const std::string& key) const;

  friend bool operator==(const ContentBlock&, const ContentBlock&) = default;
};

struct SpecDocument {
  std::string design_name;
  std::vector<ContentBlock> blocks;

  friend bool operator==(const SpecDocument&, const SpecDocument&) = default;
};

/// Throws InvalidBlock (with the block index) on the first violated invariant.
void validate_block(const ContentBlock& block, std::size_t index);
void validate_document(const SpecDocument& doc);

nlohmann::json block_to_json(const ContentBlock& block);
ContentBlock block_from_json(const nlohmann::json& j, std::size_t index);

/// Block-stream text: a `meta` line followed by one JSON object per block.
std::string write_blockstream(const SpecDocument& doc);
SpecDocument parse_blockstream(std::string_view text);

SpecDocument load_spec(const std::filesystem::path& path);
void store_spec(const SpecDocument& doc, const std::filesystem::path& path);

/// Fallback splitter for documents without layout-analyzer output.
SpecDocument split_plaintext(std::string_view text, const std::string& design_name);

}  // namespace specsva
