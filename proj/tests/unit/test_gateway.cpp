#include <gtest/gtest.h>

#include <httplib.h>

#include <random>
#include <thread>

#include "test_support.hpp"
#include "vqa/core/config.hpp"
#include "vqa/core/error.hpp"
#include "vqa/gateway/cache.hpp"
#include "vqa/gateway/cached.hpp"
#include "vqa/gateway/digest.hpp"
#include "vqa/gateway/factory.hpp"
#include "vqa/gateway/http.hpp"
#include "vqa/gateway/scripted.hpp"

using namespace vqa;
using namespace vqa::gateway;
using nlohmann::json;

namespace {

ChatRequest sample_request() {
  ChatRequest r;
  r.model_id = "gpt-4o";
  r.messages.push_back({MessageRole::System, "You are a medical AI assistant.", {}});
  r.messages.push_back({MessageRole::User, "Has the midline of the mediastinum shifted?", ImageRef("https://x/cxr.png")});
  return r;
}

class LocalServer {
 public:
  explicit LocalServer(std::function<void(httplib::Server&)> routes) {
    routes(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string completion_body(const std::string& text) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})}}.dump();
}

HttpOptions fast_options(const std::string& endpoint) {
  HttpOptions o;
  o.endpoint = endpoint;
  o.model = "gpt-4o";
  o.timeout_s = 5;
  o.retry.initial_backoff = std::chrono::milliseconds(0);
  return o;
}

}  // namespace

TEST(Digest, Sha256KnownVectors) {
  EXPECT_EQ(to_hex(sha256("")), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(to_hex(sha256("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CacheKey, CanonicalJsonRoundTrip) {
  const auto r = sample_request();
  EXPECT_EQ(chat_request_from_json(to_canonical_json(r)), r);
}

TEST(CacheKey, FieldOrderDoesNotMatter) {
  std::mt19937_64 rng(1);
  const auto reference = cache_key(sample_request());
  const auto doc = to_canonical_json(sample_request());
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  for (int i = 0; i < 50; ++i) {
    std::shuffle(keys.begin(), keys.end(), rng);
    json permuted = json::object();
    for (const auto& k : keys) permuted[k] = doc[k];
    ASSERT_EQ(cache_key_for_document(permuted), reference);
    ASSERT_EQ(cache_key(chat_request_from_json(permuted)), reference);
  }
}

TEST(CacheKey, DistinguishesEveryField) {
  const auto base = cache_key(sample_request());
  auto r = sample_request();
  r.temperature = 0.7;
  EXPECT_NE(cache_key(r), base);
  r = sample_request();
  r.max_tokens = 10;
  EXPECT_NE(cache_key(r), base);
  r = sample_request();
  r.model_id = "other";
  EXPECT_NE(cache_key(r), base);
  r = sample_request();
  r.messages[1].image.reset();
  EXPECT_NE(cache_key(r), base);
  r = sample_request();
  r.messages[0].role = MessageRole::User;
  EXPECT_NE(cache_key(r), base);
  EXPECT_EQ(base.hex().size(), 64u);
}

TEST(ChatRequest, Validation) {
  ChatRequest empty;
  EXPECT_THROW(empty.validate(), BackendError);
  auto two_images = sample_request();
  two_images.messages[0].image = ImageRef("a.png");
  EXPECT_THROW(two_images.validate(), BackendError);
}

TEST(ResponseCache, StoresOnceAndReloads) {
  testkit::TempDir dir;
  ResponseCache cache(dir.path());
  const auto key = cache_key(sample_request()).hex();
  EXPECT_FALSE(cache.lookup(key));
  EXPECT_TRUE(cache.store(key, {"Yes", "gpt-4o", "2024-01-01T00:00:00Z"}));
  EXPECT_FALSE(cache.store(key, {"No", "gpt-4o", "2024-01-02T00:00:00Z"}));
  EXPECT_EQ(cache.writes(), 1u);
  EXPECT_EQ(cache.path_for(key), dir.path() / key.substr(0, 2) / (key + ".json"));
  ResponseCache reopened(dir.path());
  ASSERT_TRUE(reopened.lookup(key));
  EXPECT_EQ(reopened.lookup(key)->response, "Yes");
  const auto stats = ResponseCache::stats(dir.path());
  EXPECT_EQ(stats.entries, 1u);
  EXPECT_GT(stats.bytes, 0u);
  EXPECT_EQ(ResponseCache::clear(dir.path()), 1u);
  EXPECT_EQ(ResponseCache::stats(dir.path()).entries, 0u);
}

TEST(ResponseCache, ConcurrentStoresWriteOnce) {
  testkit::TempDir dir;
  ResponseCache cache(dir.path());
  std::vector<std::thread> threads;
  std::atomic<int> wrote{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 20; ++i) {
        if (cache.store(to_hex(sha256(std::to_string(i))), {"v", "m", "t"})) ++wrote;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(wrote.load(), 20);
  EXPECT_EQ(ResponseCache::stats(dir.path()).entries, 20u);
}

TEST(Transcript, ParseFormatRoundTrip) {
  const std::string source = R"(# header comment

=== Reasoner
?? Has the midline
Analysis: X.

Answer: No
=== Evaluator
Score: 4
\=== not a header
\?? not an expectation
)";
  const auto records = parse_transcript(source);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].role, AgentRole::Reasoner);
  EXPECT_EQ(records[0].expects, std::vector<std::string>{"Has the midline"});
  EXPECT_EQ(records[0].response, "Analysis: X.\n\nAnswer: No");
  EXPECT_EQ(records[1].response, "Score: 4\n=== not a header\n?? not an expectation");
  EXPECT_EQ(parse_transcript(format_transcript(records)), records);
}

TEST(Transcript, ParseErrors) {
  EXPECT_THROW(parse_transcript("stray text\n=== Reasoner\nx"), ParseError);
  EXPECT_THROW(parse_transcript("=== Critic\nx"), ParseError);
}

TEST(ScriptedBackend, ServesInOrderAndChecks) {
  ScriptedChatBackend backend(parse_transcript("=== Reasoner\n?? midline\nAnalysis: X.\n\nAnswer: No\n=== Evaluator\nScore: 4\n"));
  EXPECT_TRUE(backend.is_ordered());
  auto req = sample_request();
  EXPECT_THROW(backend.complete(AgentRole::Evaluator, req), ScriptError);
  EXPECT_EQ(backend.complete(AgentRole::Reasoner, req).text, "Analysis: X.\n\nAnswer: No");
  EXPECT_EQ(backend.served(), 1u);
  EXPECT_EQ(backend.complete(AgentRole::Evaluator, req).text, "Score: 4");
  EXPECT_THROW(backend.complete(AgentRole::Evaluator, req), ScriptError);
}

TEST(ScriptedBackend, ExpectationFailureAndExhaustion) {
  ScriptedChatBackend backend(parse_transcript("=== Reasoner\n?? not in the prompt\nx\n"));
  EXPECT_THROW(backend.complete(AgentRole::Reasoner, sample_request()), ScriptError);
  ScriptedChatBackend empty({});
  EXPECT_THROW(empty.complete(AgentRole::Perceiver, sample_request()), ScriptError);
}

TEST(EmbeddingFixture, ParsesAndEscapes) {
  const auto table = parse_embedding_fixture("# c\nlung\t1 0 0\nA\\nB\t0,1,0\nx y\t0 0 1\n");
  EXPECT_EQ(table.at("lung").values, (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(table.at("A\nB").values, (std::vector<double>{0, 1, 0}));
  EXPECT_EQ(table.at("x y").dim(), 3u);
  EXPECT_THROW(parse_embedding_fixture("a\t1 0\nb\t1 0 0\n"), ParseError);
  EXPECT_THROW(parse_embedding_fixture("a\t1 q\n"), ParseError);
  EXPECT_THROW(parse_embedding_fixture("a 1 0\n"), ParseError);
  EXPECT_THROW(parse_embedding_fixture("a\t1\na\t2\n"), ParseError);
  ScriptedEmbeddingProvider p(table);
  EXPECT_EQ(p.embed_text("lung").vector.values, (std::vector<double>{1, 0, 0}));
  EXPECT_THROW(p.embed_text("heart"), ScriptError);
}

TEST(CachedBackend, SecondCallIsServedFromCache) {
  testkit::TempDir dir;
  auto inner = std::make_shared<testkit::FnChat>([](AgentRole, const ChatRequest&) { return "Yes"; });
  CachedChatBackend cached(inner, std::make_shared<ResponseCache>(dir.path()));
  const auto first = cached.complete(AgentRole::Reasoner, sample_request());
  const auto second = cached.complete(AgentRole::Reasoner, sample_request());
  EXPECT_FALSE(first.cache_hit);
  EXPECT_TRUE(second.cache_hit);
  EXPECT_EQ(first.text, second.text);
  EXPECT_EQ(inner->calls(), 1);
}

TEST(CachedEmbedder, IdenticalVectorsAcrossCalls) {
  testkit::TempDir dir;
  auto inner = std::make_shared<testkit::HashEmbedder>(5);
  CachedEmbeddingProvider cached(inner, std::make_shared<ResponseCache>(dir.path()));
  const auto a = cached.embed_text("lung");
  const auto b = cached.embed_text("lung");
  EXPECT_FALSE(a.cache_hit);
  EXPECT_TRUE(b.cache_hit);
  EXPECT_EQ(a.vector, b.vector);
  EXPECT_TRUE(cached.embed_image(ImageRef("a.png")).vector != a.vector);
}

TEST(Http, WireFormatAndAuthorization) {
  json seen;
  std::string auth, path;
  LocalServer server([&](httplib::Server& s) {
    s.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
      seen = json::parse(req.body);
      auth = req.get_header_value("Authorization");
      path = req.path;
      res.set_content(completion_body("Score: 4"), "application/json");
    });
  });
  auto opts = fast_options(server.endpoint());
  opts.api_key = "sk-test";
  HttpChatBackend backend(opts);
  const auto before = network_calls();
  EXPECT_EQ(backend.complete(AgentRole::Evaluator, sample_request()).text, "Score: 4");
  EXPECT_EQ(network_calls() - before, 1u);
  EXPECT_EQ(auth, "Bearer sk-test");
  EXPECT_EQ(path, "/v1/chat/completions");
  EXPECT_EQ(seen["model"], "gpt-4o");
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["messages"][0]["role"], "system");
  EXPECT_EQ(seen["messages"][0]["content"], "You are a medical AI assistant.");
  EXPECT_EQ(seen["messages"][1]["content"][0]["text"], "Has the midline of the mediastinum shifted?");
  EXPECT_EQ(seen["messages"][1]["content"][1]["image_url"]["url"], "https://x/cxr.png");
}

TEST(Http, LocalImagesBecomeDataUris) {
  testkit::TempDir dir;
  testkit::write_text(dir.path() / "img.png", "abc");
  EXPECT_EQ(image_to_url(ImageRef((dir.path() / "img.png").string())), "data:image/png;base64,YWJj");
  EXPECT_THROW(image_to_url(ImageRef((dir.path() / "missing.png").string())), BackendError);
}

TEST(Http, RetriesTransientFailures) {
  std::atomic<int> hits{0};
  LocalServer server([&](httplib::Server& s) {
    s.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      if (++hits < 3) {
        res.status = hits == 1 ? 503 : 429;
        return;
      }
      res.set_content(completion_body("ok"), "application/json");
    });
  });
  HttpChatBackend backend(fast_options(server.endpoint()));
  EXPECT_EQ(backend.complete(AgentRole::Reasoner, sample_request()).text, "ok");
  EXPECT_EQ(hits.load(), 3);
}

TEST(Http, GivesUpAfterThreeAttempts) {
  std::atomic<int> hits{0};
  LocalServer server([&](httplib::Server& s) {
    s.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      ++hits;
      res.status = 500;
    });
  });
  HttpChatBackend backend(fast_options(server.endpoint()));
  EXPECT_THROW(backend.complete(AgentRole::Reasoner, sample_request()), NetworkError);
  EXPECT_EQ(hits.load(), 3);
}

TEST(Http, ClientErrorsAreNotRetried) {
  std::atomic<int> hits{0};
  LocalServer server([&](httplib::Server& s) {
    s.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      ++hits;
      res.status = 400;
      res.set_content("bad request", "text/plain");
    });
  });
  HttpChatBackend backend(fast_options(server.endpoint()));
  try {
    backend.complete(AgentRole::Reasoner, sample_request());
    FAIL() << "expected BackendError";
  } catch (const NetworkError&) {
    FAIL() << "4xx must not be reported as a transport failure";
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("400"), std::string::npos);
  }
  EXPECT_EQ(hits.load(), 1);
}

TEST(Http, FullPathEndpointAndEmbeddings) {
  LocalServer server([&](httplib::Server& s) {
    s.Post("/api/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      EXPECT_EQ(body["input"], "lung");
      res.set_content(json{{"data", json::array({{{"embedding", {0.5, 0.25}}}})}}.dump(), "application/json");
    });
  });
  HttpEmbeddingProvider provider(fast_options(server.endpoint() + "/api/embeddings"));
  EXPECT_EQ(provider.embed_text("lung").vector.values, (std::vector<double>{0.5, 0.25}));
}

TEST(Http, OfflineRefusesWithoutNetwork) {
  auto opts = fast_options("http://127.0.0.1:9");
  opts.offline = true;
  HttpChatBackend backend(opts);
  const auto before = network_calls();
  EXPECT_THROW(backend.complete(AgentRole::Reasoner, sample_request()), OfflineError);
  EXPECT_EQ(network_calls(), before);
}

TEST(Http, OfflineCacheMissNamesTheKey) {
  testkit::TempDir dir;
  auto opts = fast_options("http://127.0.0.1:9");
  opts.offline = true;
  CachedChatBackend cached(std::make_shared<HttpChatBackend>(opts), std::make_shared<ResponseCache>(dir.path()));
  auto req = sample_request();
  try {
    cached.complete(AgentRole::Reasoner, req);
    FAIL() << "expected OfflineError";
  } catch (const OfflineError& e) {
    EXPECT_NE(std::string(e.what()).find(cache_key(req).hex()), std::string::npos);
  }
  ResponseCache(dir.path()).store(cache_key(req).hex(), {"cached answer", "gpt-4o", "t"});
  const auto before = network_calls();
  EXPECT_EQ(cached.complete(AgentRole::Reasoner, req).text, "cached answer");
  EXPECT_EQ(network_calls(), before);
}

TEST(Http, ParseChatResponse) {
  EXPECT_EQ(parse_chat_response(completion_body("hi")), "hi");
  EXPECT_EQ(parse_chat_response(R"({"choices":[{"message":{"content":[{"type":"text","text":"a"},{"type":"text","text":"b"}]}}]})"), "ab");
  EXPECT_THROW(parse_chat_response("not json"), BackendError);
  EXPECT_THROW(parse_chat_response("{}"), BackendError);
}

TEST(Factory, IdenticalSpecsShareOneBackend) {
  testkit::TempDir dir;
  testkit::write_text(dir.path() / "t.txt", "=== Perceiver\na\n");
  BackendSpec spec;
  spec.script = (dir.path() / "t.txt").string();
  BackendFactory factory;
  auto a = factory.chat(spec);
  auto b = factory.chat(spec);
  EXPECT_EQ(a.get(), b.get());
  BackendSpec other = spec;
  other.timeout_s = 5;
  EXPECT_NE(factory.chat(other).get(), a.get());
}

TEST(Factory, CacheDirWrapsBackends) {
  testkit::TempDir dir;
  testkit::write_text(dir.path() / "t.txt", "=== Perceiver\na\n");
  BackendSpec spec;
  spec.script = (dir.path() / "t.txt").string();
  GatewayOptions options;
  options.cache_dir = (dir.path() / "cache").string();
  BackendFactory factory(options);
  auto chat = factory.chat(spec);
  EXPECT_NE(dynamic_cast<CachedChatBackend*>(chat.get()), nullptr);
  EXPECT_TRUE(chat->is_ordered());
}
