#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "vqa/core/types.hpp"

namespace vqa {

/// How to reach one model or embedding provider.
struct BackendSpec {
  enum class Kind { Http, Scripted };

  Kind kind = Kind::Scripted;
  std::string endpoint;     // Http: base URL, e.g. "http://localhost:8000"
  std::string model;        // Http: model id sent on the wire
  std::string api_key_env;  // Http: name of the environment variable holding the key
  std::string script;       // Scripted: transcript (chat) or fixture table (embedder)
  std::string cache_dir;    // nonempty: wrap in the on-disk response cache
  int timeout_s = 120;

  friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

struct RunConfig {
  int max_iterations = 3;
  int confidence_threshold = 3;
  int max_sub_questions = 3;
  int k_shot = 4;
  std::uint64_t rng_seed = 0;
  /// >0 replaces the confidence-gated loop with exactly this many passes.
  int fixed_iterations = 0;
  int workers = 1;
  int retrieval_top_n = 5;
  double retrieval_min_similarity = 0.0;
  /// Hard cap on rendered history length in bytes; 0 disables the check.
  std::size_t max_history_chars = 1'000'000;

  std::optional<std::string> kg_path;
  std::optional<std::string> relation_phrases_path;
  std::optional<std::string> prompts_dir;
  std::optional<std::string> pool_path;
  std::optional<std::string> lexicon_path;

  /// Keyed by lowercase role name, or "default" for roles left unbound.
  std::map<std::string, BackendSpec> chat_backends;
  std::optional<BackendSpec> text_embedder;
  std::optional<BackendSpec> image_embedder;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  std::optional<BackendSpec> backend_for(AgentRole role) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses the TOML-style key/value config format. Relative paths are
/// resolved against `base_dir` when it is nonempty.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

}  // namespace vqa
