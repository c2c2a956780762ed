#include "vqa/gateway/factory.hpp"

#include <cstdlib>

#include "vqa/core/error.hpp"
#include "vqa/gateway/cached.hpp"
#include "vqa/gateway/scripted.hpp"

namespace vqa::gateway {

BackendFactory::BackendFactory(GatewayOptions options) : options_(std::move(options)) {}

std::shared_ptr<ResponseCache> BackendFactory::cache_at(const std::string& dir) {
  auto& slot = caches_[dir];
  if (!slot) slot = std::make_shared<ResponseCache>(dir);
  return slot;
}

HttpOptions BackendFactory::http_options(const BackendSpec& spec) const {
  HttpOptions http;
  http.endpoint = spec.endpoint;
  http.model = spec.model;
  http.timeout_s = spec.timeout_s;
  http.offline = options_.offline;
  http.retry = options_.retry;
  if (!spec.api_key_env.empty()) {
    if (const char* key = std::getenv(spec.api_key_env.c_str())) http.api_key = key;
  }
  return http;
}

std::shared_ptr<ChatBackend> BackendFactory::chat(const BackendSpec& spec) {
  std::lock_guard lock(mutex_);
  for (const auto& [s, b] : chats_) {
    if (s == spec) return b;
  }
  std::shared_ptr<ChatBackend> backend;
  if (spec.kind == BackendSpec::Kind::Scripted) {
    backend = scripted_backend_from_transcript(spec.script);
  } else {
    backend = std::make_shared<HttpChatBackend>(http_options(spec));
  }
  const auto cache_dir = options_.cache_dir ? *options_.cache_dir : spec.cache_dir;
  if (!cache_dir.empty()) backend = std::make_shared<CachedChatBackend>(backend, cache_at(cache_dir));
  chats_.emplace_back(spec, backend);
  return backend;
}

std::shared_ptr<EmbeddingProvider> BackendFactory::embedder(const BackendSpec& spec) {
  std::lock_guard lock(mutex_);
  for (const auto& [s, e] : embedders_) {
    if (s == spec) return e;
  }
  std::shared_ptr<EmbeddingProvider> provider;
  if (spec.kind == BackendSpec::Kind::Scripted) {
    provider = ScriptedEmbeddingProvider::from_file(spec.script);
  } else {
    provider = std::make_shared<HttpEmbeddingProvider>(http_options(spec));
  }
  const auto cache_dir = options_.cache_dir ? *options_.cache_dir : spec.cache_dir;
  if (!cache_dir.empty()) {
    provider = std::make_shared<CachedEmbeddingProvider>(provider, cache_at(cache_dir));
  }
  embedders_.emplace_back(spec, provider);
  return provider;
}

}  // namespace vqa::gateway
