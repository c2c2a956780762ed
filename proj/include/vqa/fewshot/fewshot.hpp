#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vqa/agents/prompts.hpp"
#include "vqa/core/types.hpp"
#include "vqa/gateway/chat.hpp"

namespace vqa::fewshot {

using gateway::EmbeddingVector;

struct CandidateExample {
  std::string id;
  std::string caption;
  std::string question;
  std::string answer;
  EmbeddingVector text_embedding;
  EmbeddingVector image_embedding;

  friend bool operator==(const CandidateExample&, const CandidateExample&) = default;
};

struct PoolBuildResult {
  std::vector<CandidateExample> pool;
  /// (sample id, reason) for every sample left out.
  std::vector<std::pair<std::string, std::string>> skipped;
};

/// Captions each sample with the perceiver and embeds its question and image.
/// Samples that fail (no ground truth, backend error) are skipped and listed.
PoolBuildResult build_pool(std::span<const Sample> samples, gateway::ChatBackend& perceiver,
                           gateway::EmbeddingProvider& text_embedder,
                           gateway::EmbeddingProvider& image_embedder,
                           const agents::PromptLibrary& prompts, std::uint64_t rng_seed);

/// Line-delimited JSON: a header `{"format":"vqa-icl-pool","version":1,...}`
/// followed by one record per example.
std::string serialize_pool(std::span<const CandidateExample> pool);
std::vector<CandidateExample> parse_pool(std::string_view source);
void write_pool(const std::filesystem::path& path, std::span<const CandidateExample> pool);
std::vector<CandidateExample> read_pool(const std::filesystem::path& path);

struct IclSelection {
  std::vector<CandidateExample> examples;
  std::vector<double> scores;
  std::vector<std::size_t> pool_indices;
};

/// Top-k pool entries by (cos(text, text_i) + cos(image, image_i)) / 2.
/// Equal scores keep pool order. Throws BackendError on a dimension mismatch.
IclSelection select_icl(std::span<const CandidateExample> pool, const EmbeddingVector& text,
                        const EmbeddingVector& image, int k);

/// Same contract computed with the serial kernel; kept for tests and benchmarks.
IclSelection select_icl_serial(std::span<const CandidateExample> pool, const EmbeddingVector& text,
                               const EmbeddingVector& image, int k);

/// "Example {n}:\nImage description: ...\nQuestion: ...\nAnswer: ..." per
/// example, separated by blank lines; "" for an empty selection.
std::string render_icl_block(const IclSelection& selection);

}  // namespace vqa::fewshot
