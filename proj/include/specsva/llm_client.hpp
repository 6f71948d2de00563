// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

// Chat-completion client with three modes:
//   Live   - OpenAI-compatible HTTP endpoint; every response is written to a
//            content-addressed cache.
//   Replay - cache lookups only; a miss is an error.
//   Mock   - canned responses from a fixture directory.
// Replay and Mock hold no endpoint, so they cannot reach the network.

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace specsva {

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.0;
  int max_tokens = 2048;
  /// Stage label: "classify", "analyze", "generate", ...
  std::string tag;
};

struct LiveMode {
  std::string endpoint;  // e.g. https://api.openai.com/v1/chat/completions
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  std::filesystem::path cache_dir;
  double requests_per_minute = 60.0;
};

struct ReplayMode {
  std::filesystem::path cache_dir;
  std::string model;
};

/// One canned response. A fixture matches when its tag equals the request
/// tag (or is "*") and every `contains` needle occurs in system+user text.
struct MockFixture {
  std::string tag;
  std::vector<std::string> contains;
  std::string response;
};

struct MockMode {
  std::filesystem::path fixture_dir;
  /// Fixtures added programmatically are consulted after the directory.
  std::vector<MockFixture> inline_fixtures;
};

using ClientMode = std::variant<LiveMode, ReplayMode, MockMode>;

/// SHA-256 hex digest of the canonical request encoding.
std::string cache_key(const ChatRequest& req, const std::string& model);

/// Loads every `*.json` under `dir` (sorted by path). Each file holds an
/// array of {"tag", "contains": [..], "response"} objects.
std::vector<MockFixture> load_mock_fixtures(const std::filesystem::path& dir);

class LlmClient {
 public:
  explicit LlmClient(ClientMode mode);

  /// Throws HttpError, CacheMiss or FixtureMiss; every error carries the tag.
  std::string complete(const ChatRequest& req);

  bool is_mock() const { return std::holds_alternative<MockMode>(mode_); }
  bool is_offline() const { return !std::holds_alternative<LiveMode>(mode_); }
  const ClientMode& mode() const { return mode_; }

 private:
  std::string complete_live(const LiveMode& live, const ChatRequest& req);
  std::string complete_replay(const ReplayMode& replay, const ChatRequest& req) const;
  std::string complete_mock(const ChatRequest& req) const;
  void throttle(double requests_per_minute);

  ClientMode mode_;
  std::vector<MockFixture> fixtures_;
  std::mutex throttle_mutex_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
};

void validate_request(const ChatRequest& req);

}  // namespace specsva
