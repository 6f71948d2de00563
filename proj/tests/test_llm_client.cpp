// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <gtest/gtest.h>
#include <json.hpp>

#include "specsva/llm_client.hpp"
#include "specsva/merge.hpp"
#include "specsva/svagen.hpp"
#include "test_util.hpp"

using namespace specsva;
using testing_util::kind_of;

namespace {

ChatRequest request(std::string user = "hello") {
  ChatRequest r;
  r.system = "sys";
  r.user = std::move(user);
  r.tag = "classify";
  return r;
}

/// Local OpenAI-style endpoint answering every request with its own user text reversed.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      auto body = nlohmann::json::parse(req.body);
      last_auth = req.get_header_value("Authorization");
      std::string user = body["messages"][1]["content"];
      if (user == "fail") {
        res.status = 500;
        res.set_content("boom", "text/plain");
        return;
      }
      std::string reply(user.rbegin(), user.rend());
      nlohmann::json out = {{"choices", {{{"message", {{"role", "assistant"}, {"content", reply}}}}}}};
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  std::atomic<int> hits{0};
  std::string last_auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(CacheKey, PureFunctionOfRequest) {
  auto a = request();
  auto b = request();
  b.tag = "other";  // not part of the key
  EXPECT_EQ(cache_key(a, "m"), cache_key(b, "m"));
  EXPECT_EQ(cache_key(a, "m").size(), 64u);
  auto c = a;
  c.temperature = 0.5;
  auto d = a;
  d.max_tokens = 10;
  auto e = a;
  e.user += " ";
  for (const auto& x : {c, d, e}) EXPECT_NE(cache_key(x, "m"), cache_key(a, "m"));
  EXPECT_NE(cache_key(a, "m"), cache_key(a, "n"));
}

TEST(ValidateRequest, Rejects) {
  auto r = request("");
  EXPECT_EQ(kind_of([&] { validate_request(r); }), ErrorKind::InvalidRequest);
  r = request();
  r.max_tokens = 0;
  EXPECT_EQ(kind_of([&] { validate_request(r); }), ErrorKind::InvalidRequest);
  r = request();
  r.temperature = -1;
  EXPECT_EQ(kind_of([&] { validate_request(r); }), ErrorKind::InvalidRequest);
}

TEST(Mock, MatchesByTagAndNeedles) {
  LlmClient client(MockMode{{}, {{"generate", {"x", "y"}, "both"}, {"*", {"x"}, "any"}}});
  auto r = request("x and y");
  EXPECT_EQ(client.complete(r), "any");  // tag classify skips the first fixture
  r.tag = "generate";
  EXPECT_EQ(client.complete(r), "both");
  try {
    client.complete(request("nothing"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FixtureMiss);
    EXPECT_EQ(e.tag(), "classify");
  }
}

TEST(Mock, AckOutGenerationFixture) {
  auto specs = merge_all(parse_records(testing_util::fixture("fixtures/ack_out/records.jsonl")).second);
  const SignalSpec* ack = nullptr;
  for (const auto& s : specs)
    if (s.name == "ack_out") ack = &s;
  ASSERT_NE(ack, nullptr);
  LlmClient client(MockMode{testing_util::source_dir() / "fixtures/ack_out/mock", {}});
  auto out = generate_assertion(make_request(*ack), &client, nullptr);
  ASSERT_TRUE(out.result);
  EXPECT_FALSE(out.result->deterministic);
  EXPECT_EQ(out.result->pattern, AssertionPattern::Implication);
  EXPECT_EQ(out.result->steps.temporal, "##[1:2] ack_out[*2]");
}

TEST(Replay, MissAndHit) {
  auto dir = testing_util::scratch_dir("replay");
  LlmClient client(ReplayMode{dir, "m"});
  EXPECT_EQ(kind_of([&] { client.complete(request()); }), ErrorKind::CacheMiss);
  util::write_file(dir / (cache_key(request(), "m") + ".txt"), "cached\nbytes");
  EXPECT_EQ(client.complete(request()), "cached\nbytes");
  EXPECT_EQ(kind_of([&] { client.complete(request("hello!")); }), ErrorKind::CacheMiss);
  EXPECT_TRUE(client.is_offline());
}

TEST(Live, RecordsThenReplays) {
  FakeEndpoint server;
  auto dir = testing_util::scratch_dir("live");
  ::setenv("SPECSVA_TEST_KEY", "k123", 1);
  LlmClient live(LiveMode{server.url(), "m", "SPECSVA_TEST_KEY", dir, 0});
  EXPECT_EQ(live.complete(request("abc")), "cba");
  EXPECT_EQ(server.last_auth, "Bearer k123");
  EXPECT_EQ(live.complete(request("abc")), "cba");
  EXPECT_EQ(server.hits.load(), 1);  // second call served from cache

  LlmClient replay(ReplayMode{dir, "m"});
  EXPECT_EQ(replay.complete(request("abc")), "cba");
  EXPECT_EQ(server.hits.load(), 1);
}

TEST(Live, HttpErrorCarriesStatusAndTag) {
  FakeEndpoint server;
  LlmClient live(LiveMode{server.url(), "m", "", {}, 0});
  try {
    live.complete(request("fail"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HttpError);
    EXPECT_EQ(e.index(), 500u);
    EXPECT_EQ(e.tag(), "classify");
  }
}

TEST(Live, Throttles) {
  FakeEndpoint server;
  LlmClient live(LiveMode{server.url(), "m", "", {}, 600});  // 100 ms apart
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 3; ++i) live.complete(request("r" + std::to_string(i)));
  EXPECT_GE(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(190));
}
