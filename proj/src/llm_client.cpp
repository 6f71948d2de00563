// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/llm_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>
#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/util.hpp"

namespace specsva {

using nlohmann::json;

namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::IoError, "sha256 failed");
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorKind::ConfigError, "endpoint must include a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::filesystem::path cache_file(const std::filesystem::path& dir, const std::string& key) {
  return dir / (key + ".txt");
}

}  // namespace

void validate_request(const ChatRequest& req) {
  if (req.system.empty() || req.user.empty())
    throw Error(ErrorKind::InvalidRequest, "system and user text must be non-empty", std::nullopt,
                req.tag);
  if (req.temperature < 0.0)
    throw Error(ErrorKind::InvalidRequest, "temperature must be >= 0", std::nullopt, req.tag);
  if (req.max_tokens <= 0)
    throw Error(ErrorKind::InvalidRequest, "max_tokens must be positive", std::nullopt, req.tag);
}

std::string cache_key(const ChatRequest& req, const std::string& model) {
  // The tag is not part of the key.
  json canonical = {{"system", req.system},
                    {"user", req.user},
                    {"temperature", req.temperature},
                    {"max_tokens", req.max_tokens},
                    {"model", model}};
  return sha256_hex(canonical.dump());
}

std::vector<MockFixture> load_mock_fixtures(const std::filesystem::path& dir) {
  std::vector<MockFixture> fixtures;
  if (dir.empty()) return fixtures;
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorKind::ConfigError, "mock fixture directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    json j;
    try {
      j = json::parse(util::read_file(file));
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::ConfigError, fmt::format("{}: {}", file.string(), e.what()));
    }
    if (!j.is_array()) throw Error(ErrorKind::ConfigError, file.string() + ": expected an array");
    for (const auto& item : j) {
      MockFixture f;
      f.tag = item.value("tag", std::string("*"));
      if (item.contains("contains")) f.contains = item["contains"].get<std::vector<std::string>>();
      if (item.contains("response_lines"))
        f.response = util::join(item["response_lines"].get<std::vector<std::string>>(), "\n");
      else
        f.response = item.at("response").get<std::string>();
      fixtures.push_back(std::move(f));
    }
  }
  return fixtures;
}

LlmClient::LlmClient(ClientMode mode) : mode_(std::move(mode)) {
  if (auto* mock = std::get_if<MockMode>(&mode_)) {
    fixtures_ = load_mock_fixtures(mock->fixture_dir);
    fixtures_.insert(fixtures_.end(), mock->inline_fixtures.begin(), mock->inline_fixtures.end());
  }
}

std::string LlmClient::complete(const ChatRequest& req) {
  validate_request(req);
  if (auto* live = std::get_if<LiveMode>(&mode_)) return complete_live(*live, req);
  if (auto* replay = std::get_if<ReplayMode>(&mode_)) return complete_replay(*replay, req);
  return complete_mock(req);
}

void LlmClient::throttle(double requests_per_minute) {
  if (requests_per_minute <= 0) return;
  std::lock_guard lock(throttle_mutex_);
  auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(60.0 / requests_per_minute));
  auto now = std::chrono::steady_clock::now();
  if (last_request_ && now < *last_request_ + interval) {
    std::this_thread::sleep_until(*last_request_ + interval);
    now = std::chrono::steady_clock::now();
  }
  last_request_ = now;
}

std::string LlmClient::complete_live(const LiveMode& live, const ChatRequest& req) {
  auto key = cache_key(req, live.model);
  if (!live.cache_dir.empty()) {
    auto path = cache_file(live.cache_dir, key);
    if (std::filesystem::exists(path)) return util::read_file(path);
  }

  throttle(live.requests_per_minute);

  json body = {{"model", live.model},
               {"temperature", req.temperature},
               {"max_tokens", req.max_tokens},
               {"messages",
                json::array({{{"role", "system"}, {"content", req.system}},
                             {{"role", "user"}, {"content", req.user}}})}};

  auto endpoint = split_endpoint(live.endpoint);
  httplib::Client http(endpoint.scheme_host_port);
  http.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (!live.api_key_env.empty()) {
    if (const char* key_value = std::getenv(live.api_key_env.c_str()))
      headers.emplace("Authorization", std::string("Bearer ") + key_value);
  }
  auto res = http.Post(endpoint.path, headers, body.dump(), "application/json");
  if (!res)
    throw Error(ErrorKind::HttpError,
                fmt::format("request failed: {}", httplib::to_string(res.error())), 0, req.tag);
  if (res->status != 200)
    throw Error(ErrorKind::HttpError, fmt::format("status {}: {}", res->status, res->body),
                static_cast<std::size_t>(res->status), req.tag);

  std::string text;
  try {
    auto reply = json::parse(res->body);
    text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::HttpError, fmt::format("malformed completion body: {}", e.what()),
                static_cast<std::size_t>(res->status), req.tag);
  }
  if (!live.cache_dir.empty()) util::write_file(cache_file(live.cache_dir, key), text);
  return text;
}

std::string LlmClient::complete_replay(const ReplayMode& replay, const ChatRequest& req) const {
  auto key = cache_key(req, replay.model);
  auto path = cache_file(replay.cache_dir, key);
  if (!std::filesystem::exists(path))
    throw Error(ErrorKind::CacheMiss, "no cached response for key " + key, std::nullopt, req.tag);
  return util::read_file(path);
}

std::string LlmClient::complete_mock(const ChatRequest& req) const {
  std::string haystack = req.system + "\n" + req.user;
  for (const auto& fixture : fixtures_) {
    if (fixture.tag != "*" && fixture.tag != req.tag) continue;
    bool all = std::all_of(fixture.contains.begin(), fixture.contains.end(),
                           [&](const std::string& needle) {
                             return haystack.find(needle) != std::string::npos;
                           });
    if (all) return fixture.response;
  }
  throw Error(ErrorKind::FixtureMiss, "no mock fixture matches request", std::nullopt, req.tag);
}

}  // namespace specsva
