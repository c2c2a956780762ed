#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqa/core/types.hpp"

namespace vqa::gateway {

enum class MessageRole { System, User };

struct ChatMessage {
  MessageRole role = MessageRole::User;
  std::string text;
  std::optional<ImageRef> image;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  /// Filled in by the backend that serves the request when left empty.
  std::string model_id;
  double temperature = 0.0;
  int max_tokens = 1024;

  /// At most one image, at least one message, sane sampling parameters.
  void validate() const;
  /// Concatenated message text, used for transcript expectations.
  std::string joined_text() const;

  friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

/// Canonical form used for hashing: sorted object keys, no auth material.
nlohmann::json to_canonical_json(const ChatRequest& request);
ChatRequest chat_request_from_json(const nlohmann::json& doc);

struct CacheKey {
  std::array<std::uint8_t, 32> digest{};

  std::string hex() const;
  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

/// SHA-256 over the canonical serialization of `request`.
CacheKey cache_key(const ChatRequest& request);
CacheKey cache_key_for_document(const nlohmann::json& canonical);

struct Completion {
  std::string text;
  bool cache_hit = false;
};

/// Anything that turns a chat request into model text. Implementations other
/// than the scripted backend are safe to share across threads.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  /// `caller` identifies the agent issuing the request; only the scripted
  /// backend looks at it.
  virtual Completion complete(AgentRole caller, const ChatRequest& request) = 0;
  virtual std::string model_id() const = 0;
  /// True when responses are served in a fixed order (single consumer).
  virtual bool is_ordered() const { return false; }
};

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

struct EmbeddingResult {
  EmbeddingVector vector;
  bool cache_hit = false;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual EmbeddingResult embed_text(const std::string& text) = 0;
  virtual EmbeddingResult embed_image(const ImageRef& image) = 0;
  virtual std::string model_id() const = 0;
};

/// Process-wide count of outgoing HTTP attempts.
std::uint64_t network_calls();
void count_network_call();

}  // namespace vqa::gateway
