// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/spec_ir.hpp"

#include <array>
#include <cctype>
#include <utility>

#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/util.hpp"

namespace specsva {

using nlohmann::json;

namespace {

constexpr std::string_view kBlockstreamSchema = "specsva/blockstream";
constexpr int kSchemaVersion = 1;

struct CategoryName {
  SemanticCategory::Kind kind;
  std::string_view display;
};

constexpr std::array<CategoryName, 6> kCategoryNames{{
    {SemanticCategory::Kind::Architecture, "Architecture"},
    {SemanticCategory::Kind::ModuleInterface, "Module Interface"},
    {SemanticCategory::Kind::TimingBehavior, "Timing Behavior"},
    {SemanticCategory::Kind::ControlLogic, "Control Logic"},
    {SemanticCategory::Kind::ResetBehavior, "Reset Behavior"},
    {SemanticCategory::Kind::ConfigurationInfo, "Configuration Info"},
}};

// Lowercased alphanumerics only, so "Module/Interface Declaration" and
// "module interface" collapse onto comparable keys.
std::string category_key(std::string_view text) {
  std::string key;
  for (char c : util::lower(text))
    if (std::isalnum(static_cast<unsigned char>(c))) key += c;
  return key;
}

}  // namespace

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Text: return "TEXT";
    case Modality::Table: return "TABLE";
    case Modality::Formula: return "FORMULA";
    case Modality::Diagram: return "DIAGRAM";
  }
  return "TEXT";
}

std::optional<Modality> parse_modality(std::string_view text) {
  auto t = util::lower(util::trim(text));
  if (t == "text") return Modality::Text;
  if (t == "table") return Modality::Table;
  if (t == "formula") return Modality::Formula;
  if (t == "diagram") return Modality::Diagram;
  return std::nullopt;
}

static std::optional<SemanticCategory::Kind> match_known_category(std::string_view text) {
  auto key = category_key(text);
  for (const auto& entry : kCategoryNames)
    if (key == category_key(entry.display)) return entry.kind;
  if (key == "moduleinterfacedeclaration" || key == "interfacedeclaration" ||
      key == "moduledeclaration" || key == "interface")
    return SemanticCategory::Kind::ModuleInterface;
  if (key == "timing") return SemanticCategory::Kind::TimingBehavior;
  if (key == "configuration" || key == "config") return SemanticCategory::Kind::ConfigurationInfo;
  if (key == "reset") return SemanticCategory::Kind::ResetBehavior;
  return std::nullopt;
}

// Labels that spell a known category collapse onto it, keeping the
// serialized form canonical.
SemanticCategory SemanticCategory::other(std::string label) {
  if (auto known = match_known_category(label)) return SemanticCategory(*known);
  SemanticCategory c(Kind::Other);
  c.label_ = std::string(util::trim(label));
  return c;
}

SemanticCategory SemanticCategory::from_text(std::string_view text) {
  return other(std::string(text));
}

std::string SemanticCategory::name() const {
  if (kind_ == Kind::Other) return label_;
  for (const auto& entry : kCategoryNames)
    if (entry.kind == kind_) return std::string(entry.display);
  return label_;
}

bool BoundingBox::valid() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  return in_unit(x0) && in_unit(y0) && in_unit(x1) && in_unit(y1) && x0 <= x1 && y0 <= y1;
}

std::string ContentBlock::hint(const std::string& key) const {
  auto it = layout_hints.find(key);
  return it == layout_hints.end() ? std::string{} : it->second;
}

void validate_block(const ContentBlock& block, std::size_t index) {
  if (util::trim(block.content).empty())
    throw Error(ErrorKind::InvalidBlock, fmt::format("block {}: empty content", index), index);
  if (block.page_number < 1)
    throw Error(ErrorKind::InvalidBlock,
                fmt::format("block {}: page_number {} < 1", index, block.page_number), index);
  if (block.bounding_box && !block.bounding_box->valid())
    throw Error(ErrorKind::InvalidBlock, fmt::format("block {}: bounding box out of range", index),
                index);
  if (block.semantic_category &&
      block.semantic_category->kind() == SemanticCategory::Kind::Other &&
      util::trim(block.semantic_category->label()).empty())
    throw Error(ErrorKind::InvalidBlock,
                fmt::format("block {}: Other category needs a label", index), index);
}

void validate_document(const SpecDocument& doc) {
  if (util::trim(doc.design_name).empty())
    throw Error(ErrorKind::MalformedDocument, "design_name is empty");
  if (doc.blocks.empty()) throw Error(ErrorKind::MalformedDocument, "document has no blocks");
  for (std::size_t i = 0; i < doc.blocks.size(); ++i) validate_block(doc.blocks[i], i);
}

json block_to_json(const ContentBlock& block) {
  json j;
  j["content"] = block.content;
  j["modality"] = block.modality ? json(to_string(*block.modality)) : json(nullptr);
  j["semantic_category"] =
      block.semantic_category ? json(block.semantic_category->name()) : json(nullptr);
  j["page_number"] = block.page_number;
  if (block.bounding_box) {
    const auto& b = *block.bounding_box;
    j["bounding_box"] = {{"x0", b.x0}, {"y0", b.y0}, {"x1", b.x1}, {"y1", b.y1}};
  } else {
    j["bounding_box"] = nullptr;
  }
  j["layout_hints"] = block.layout_hints;
  return j;
}

ContentBlock block_from_json(const json& j, std::size_t index) {
  auto malformed = [index](const std::string& what) {
    return Error(ErrorKind::MalformedDocument, fmt::format("block {}: {}", index, what), index);
  };
  if (!j.is_object()) throw malformed("not a JSON object");
  ContentBlock block;
  if (!j.contains("content") || !j["content"].is_string()) throw malformed("missing content");
  block.content = j["content"].get<std::string>();

  if (auto it = j.find("modality"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw malformed("modality must be a string");
    auto m = parse_modality(it->get<std::string>());
    if (!m)
      throw Error(ErrorKind::InvalidBlock,
                  fmt::format("block {}: unknown modality '{}'", index, it->get<std::string>()),
                  index);
    block.modality = m;
  }
  if (auto it = j.find("semantic_category"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw malformed("semantic_category must be a string");
    block.semantic_category = SemanticCategory::from_text(it->get<std::string>());
  }
  if (auto it = j.find("page_number"); it != j.end()) {
    if (!it->is_number_integer()) throw malformed("page_number must be an integer");
    block.page_number = it->get<int>();
  }
  if (auto it = j.find("bounding_box"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw malformed("bounding_box must be an object");
    BoundingBox b;
    try {
      b.x0 = it->at("x0").get<double>();
      b.y0 = it->at("y0").get<double>();
      b.x1 = it->at("x1").get<double>();
      b.y1 = it->at("y1").get<double>();
    } catch (const json::exception&) {
      throw malformed("bounding_box needs numeric x0,y0,x1,y1");
    }
    block.bounding_box = b;
  }
  if (auto it = j.find("layout_hints"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw malformed("layout_hints must be an object");
    for (const auto& [key, value] : it->items())
      block.layout_hints[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  validate_block(block, index);
  return block;
}

std::string write_blockstream(const SpecDocument& doc) {
  std::string out;
  json meta = {{"meta",
                {{"design_name", doc.design_name},
                 {"schema", kBlockstreamSchema},
                 {"version", kSchemaVersion}}}};
  out += meta.dump() + "\n";
  for (const auto& block : doc.blocks) out += block_to_json(block).dump() + "\n";
  return out;
}

SpecDocument parse_blockstream(std::string_view text) {
  SpecDocument doc;
  bool have_meta = false;
  std::size_t block_index = 0;
  std::size_t line_no = 0;
  for (const auto& raw : util::split_lines(text)) {
    ++line_no;
    if (util::trim(raw).empty()) continue;
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::MalformedDocument, fmt::format("line {}: {}", line_no, e.what()));
    }
    if (!have_meta) {
      if (!j.is_object() || !j.contains("meta") || !j["meta"].is_object())
        throw Error(ErrorKind::MalformedDocument, "first line must be a meta object");
      const auto& meta = j["meta"];
      if (!meta.contains("design_name") || !meta["design_name"].is_string())
        throw Error(ErrorKind::MalformedDocument, "meta.design_name missing");
      doc.design_name = meta["design_name"].get<std::string>();
      have_meta = true;
      continue;
    }
    doc.blocks.push_back(block_from_json(j, block_index++));
  }
  if (!have_meta) throw Error(ErrorKind::MalformedDocument, "missing meta line");
  validate_document(doc);
  return doc;
}

SpecDocument load_spec(const std::filesystem::path& path) {
  return parse_blockstream(util::read_file(path));
}

void store_spec(const SpecDocument& doc, const std::filesystem::path& path) {
  util::write_file(path, write_blockstream(doc));
}

SpecDocument split_plaintext(std::string_view text, const std::string& design_name) {
  if (util::trim(text).empty()) throw Error(ErrorKind::EmptyInput, "plain-text input is empty");

  enum class LineKind { Blank, Table, Formula, Text };
  auto kind_of = [](std::string_view line) {
    auto t = util::trim(line);
    if (t.empty()) return LineKind::Blank;
    if (t.front() == '|') return LineKind::Table;
    if (t.front() == '$') return LineKind::Formula;
    return LineKind::Text;
  };
  auto hint_for = [](LineKind k) -> std::string {
    switch (k) {
      case LineKind::Table: return "table-like";
      case LineKind::Formula: return "formula-like";
      default: return "paragraph";
    }
  };

  SpecDocument doc;
  doc.design_name = design_name;
  std::vector<std::string> current;
  LineKind current_kind = LineKind::Blank;
  auto flush = [&] {
    if (current.empty()) return;
    ContentBlock block;
    block.content = util::join(current, "\n");
    block.page_number = 1;
    block.layout_hints["block_type"] = hint_for(current_kind);
    doc.blocks.push_back(std::move(block));
    current.clear();
  };
  for (const auto& line : util::split_lines(text)) {
    auto k = kind_of(line);
    if (k == LineKind::Blank) {
      flush();
      current_kind = LineKind::Blank;
      continue;
    }
    if (k != current_kind) flush();
    current_kind = k;
    current.push_back(line);
  }
  flush();
  return doc;
}

}  // namespace specsva
