// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace specsva::util {

std::string_view trim(std::string_view s);
std::string lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_ci(std::string_view s, std::string_view prefix);
std::vector<std::string> split_lines(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string replace_all(std::string text, std::string_view from, std::string_view to);
bool is_ident_start(char c);
bool is_ident_char(char c);
/// Whole-word identifier occurrence.
bool mentions_identifier(std::string_view text, std::string_view ident);
std::vector<std::string> identifiers_in(std::string_view text);
std::string strip_whitespace(std::string_view s);

std::string read_file(const std::filesystem::path& path);
/// Creates parent directories; throws IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace specsva::util
