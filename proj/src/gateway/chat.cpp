#include "vqa/gateway/chat.hpp"

#include <atomic>

#include "vqa/core/error.hpp"
#include "vqa/gateway/digest.hpp"

namespace vqa::gateway {

namespace {

std::atomic<std::uint64_t> g_network_calls{0};

}  // namespace

void ChatRequest::validate() const {
  if (messages.empty()) throw BackendError("chat request has no messages");
  int images = 0;
  for (const auto& m : messages) images += m.image.has_value();
  if (images > 1) throw BackendError("chat request carries more than one image");
  if (temperature < 0) throw BackendError("chat request temperature must be >= 0");
  if (max_tokens < 1) throw BackendError("chat request max_tokens must be >= 1");
}

std::string ChatRequest::joined_text() const {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "\n";
    out += m.text;
  }
  return out;
}

nlohmann::json to_canonical_json(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    nlohmann::json msg = {{"role", m.role == MessageRole::System ? "system" : "user"},
                          {"text", m.text}};
    msg["image"] = m.image ? nlohmann::json(m.image->str()) : nlohmann::json(nullptr);
    messages.push_back(std::move(msg));
  }
  return {{"max_tokens", request.max_tokens},
          {"messages", std::move(messages)},
          {"model_id", request.model_id},
          {"temperature", request.temperature}};
}

ChatRequest chat_request_from_json(const nlohmann::json& doc) {
  ChatRequest req;
  req.model_id = doc.value("model_id", "");
  req.temperature = doc.value("temperature", 0.0);
  req.max_tokens = doc.value("max_tokens", 1024);
  for (const auto& m : doc.at("messages")) {
    ChatMessage msg;
    msg.role = m.at("role").get<std::string>() == "system" ? MessageRole::System : MessageRole::User;
    msg.text = m.at("text").get<std::string>();
    if (m.contains("image") && !m["image"].is_null()) msg.image = ImageRef(m["image"].get<std::string>());
    req.messages.push_back(std::move(msg));
  }
  return req;
}

std::string CacheKey::hex() const { return to_hex(digest); }

CacheKey cache_key_for_document(const nlohmann::json& canonical) {
  return CacheKey{sha256(canonical.dump())};
}

CacheKey cache_key(const ChatRequest& request) {
  return cache_key_for_document(to_canonical_json(request));
}

std::uint64_t network_calls() { return g_network_calls.load(); }
void count_network_call() { g_network_calls.fetch_add(1); }

}  // namespace vqa::gateway
