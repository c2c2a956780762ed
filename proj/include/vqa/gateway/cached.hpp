#pragma once

#include <memory>

#include "vqa/gateway/cache.hpp"
#include "vqa/gateway/chat.hpp"

namespace vqa::gateway {

/// Serves repeated requests from the on-disk cache; misses go to the inner
/// backend and are stored once.
class CachedChatBackend final : public ChatBackend {
 public:
  CachedChatBackend(std::shared_ptr<ChatBackend> inner, std::shared_ptr<ResponseCache> cache);

  Completion complete(AgentRole caller, const ChatRequest& request) override;
  std::string model_id() const override { return inner_->model_id(); }
  bool is_ordered() const override { return inner_->is_ordered(); }

  ResponseCache& cache() { return *cache_; }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

class CachedEmbeddingProvider final : public EmbeddingProvider {
 public:
  CachedEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                          std::shared_ptr<ResponseCache> cache);

  EmbeddingResult embed_text(const std::string& text) override;
  EmbeddingResult embed_image(const ImageRef& image) override;
  std::string model_id() const override { return inner_->model_id(); }

 private:
  template <class Fetch>
  EmbeddingResult cached(const char* op, const std::string& input, Fetch&& fetch);

  std::shared_ptr<EmbeddingProvider> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

}  // namespace vqa::gateway
