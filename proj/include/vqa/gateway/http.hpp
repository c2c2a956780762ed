#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

#include "vqa/gateway/chat.hpp"

namespace vqa::gateway {

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
};

struct HttpOptions {
  /// Base URL ("http://host:port") or a full ".../chat/completions" URL.
  std::string endpoint;
  std::string model;
  std::string api_key;
  int timeout_s = 120;
  /// When set, every call fails with OfflineError before touching the network.
  bool offline = false;
  RetryPolicy retry;
};

/// Body sent to a chat-completions endpoint. Images are sent as an
/// `image_url` content part: URLs pass through, local files become data URIs.
nlohmann::json build_chat_body(const ChatRequest& request);
/// Extracts `choices[0].message.content`; throws BackendError otherwise.
std::string parse_chat_response(const std::string& body);

class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(HttpOptions options);

  Completion complete(AgentRole caller, const ChatRequest& request) override;
  std::string model_id() const override { return options_.model; }

 private:
  HttpOptions options_;
};

/// Talks to an OpenAI-style `/v1/embeddings` endpoint. Images are sent as a
/// URL or data URI in the `input` field.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(HttpOptions options);

  EmbeddingResult embed_text(const std::string& text) override;
  EmbeddingResult embed_image(const ImageRef& image) override;
  std::string model_id() const override { return options_.model; }

 private:
  EmbeddingVector post(const std::string& input);
  HttpOptions options_;
};

/// Resolves an image reference to something a remote model can fetch.
std::string image_to_url(const ImageRef& image);

/// POSTs `body` as JSON to `endpoint`, retrying transport errors, 5xx and 429
/// with exponential backoff. Returns the response body.
std::string post_json_with_retry(const HttpOptions& options, const std::string& default_path,
                                 const nlohmann::json& body);

}  // namespace vqa::gateway
