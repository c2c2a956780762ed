#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vqa/core/config.hpp"
#include "vqa/gateway/cache.hpp"
#include "vqa/gateway/chat.hpp"
#include "vqa/gateway/http.hpp"

namespace vqa::gateway {

struct GatewayOptions {
  bool offline = false;
  /// Wraps every backend in the response cache rooted here.
  std::optional<std::string> cache_dir;
  RetryPolicy retry;
};

/// Builds backends from config bindings. Identical bindings share a single
/// instance, so several roles bound to one transcript consume it in order.
class BackendFactory {
 public:
  explicit BackendFactory(GatewayOptions options = {});

  std::shared_ptr<ChatBackend> chat(const BackendSpec& spec);
  std::shared_ptr<EmbeddingProvider> embedder(const BackendSpec& spec);

  const GatewayOptions& options() const noexcept { return options_; }

 private:
  std::shared_ptr<ResponseCache> cache_at(const std::string& dir);
  HttpOptions http_options(const BackendSpec& spec) const;

  GatewayOptions options_;
  std::mutex mutex_;
  std::vector<std::pair<BackendSpec, std::shared_ptr<ChatBackend>>> chats_;
  std::vector<std::pair<BackendSpec, std::shared_ptr<EmbeddingProvider>>> embedders_;
  std::map<std::string, std::shared_ptr<ResponseCache>> caches_;
};

}  // namespace vqa::gateway
