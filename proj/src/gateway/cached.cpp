#include "vqa/gateway/cached.hpp"

#include "vqa/core/error.hpp"

namespace vqa::gateway {

CachedChatBackend::CachedChatBackend(std::shared_ptr<ChatBackend> inner,
                                     std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

Completion CachedChatBackend::complete(AgentRole caller, const ChatRequest& request) {
  request.validate();
  ChatRequest keyed = request;
  if (keyed.model_id.empty()) keyed.model_id = inner_->model_id();
  const auto key = cache_key(keyed).hex();
  if (auto hit = cache_->lookup(key)) return {hit->response, true};

  Completion fresh;
  try {
    fresh = inner_->complete(caller, keyed);
  } catch (const OfflineError&) {
    throw OfflineError("offline: cache miss for key " + key + " (" +
                       std::string(to_string(caller)) + " request to " + keyed.model_id + ")");
  }
  cache_->store(key, {fresh.text, keyed.model_id, utc_timestamp()});
  return {fresh.text, false};
}

CachedEmbeddingProvider::CachedEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                                                 std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

template <class Fetch>
EmbeddingResult CachedEmbeddingProvider::cached(const char* op, const std::string& input,
                                                Fetch&& fetch) {
  const nlohmann::json canonical = {{"input", input}, {"model_id", inner_->model_id()}, {"op", op}};
  const auto key = cache_key_for_document(canonical).hex();
  if (auto hit = cache_->lookup(key)) {
    auto doc = nlohmann::json::parse(hit->response, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) {
      throw BackendError("corrupt embedding cache entry " + key);
    }
    return {EmbeddingVector{doc.get<std::vector<double>>()}, true};
  }
  EmbeddingResult fresh;
  try {
    fresh = fetch();
  } catch (const OfflineError&) {
    throw OfflineError(std::string("offline: cache miss for key ") + key + " (" + op + ")");
  }
  cache_->store(key, {nlohmann::json(fresh.vector.values).dump(), inner_->model_id(), utc_timestamp()});
  return {fresh.vector, false};
}

EmbeddingResult CachedEmbeddingProvider::embed_text(const std::string& text) {
  return cached("embed_text", text, [&] { return inner_->embed_text(text); });
}

EmbeddingResult CachedEmbeddingProvider::embed_image(const ImageRef& image) {
  return cached("embed_image", image.str(), [&] { return inner_->embed_image(image); });
}

}  // namespace vqa::gateway
