#include "vqa/core/error.hpp"
#include "vqa/fewshot/fewshot.hpp"
#include "vqa/kernels/similarity.hpp"

namespace vqa::fewshot {

namespace {

template <class ScoreFn>
IclSelection select_with(std::span<const CandidateExample> pool, const EmbeddingVector& text,
                         const EmbeddingVector& image, int k, ScoreFn&& score) {
  if (k < 0) throw ConfigError("k_shot must be >= 0");
  IclSelection sel;
  if (k == 0) return sel;
  if (pool.empty()) throw ConfigError("few-shot selection needs a nonempty pool");

  std::vector<std::vector<double>> text_rows, image_rows;
  text_rows.reserve(pool.size());
  image_rows.reserve(pool.size());
  for (const auto& ex : pool) {
    if (ex.text_embedding.dim() != text.dim() || ex.image_embedding.dim() != image.dim()) {
      throw BackendError("embedding dimension mismatch between test sample and pool entry '" +
                         ex.id + "'");
    }
    text_rows.push_back(ex.text_embedding.values);
    image_rows.push_back(ex.image_embedding.values);
  }
  const auto scores = score(text.values, image.values, text_rows, image_rows);
  for (auto i : kernels::top_k_indices(scores, static_cast<std::size_t>(k))) {
    sel.examples.push_back(pool[i]);
    sel.scores.push_back(scores[i]);
    sel.pool_indices.push_back(i);
  }
  return sel;
}

}  // namespace

IclSelection select_icl(std::span<const CandidateExample> pool, const EmbeddingVector& text,
                        const EmbeddingVector& image, int k) {
  return select_with(pool, text, image, k, [](auto&&... a) { return kernels::dual_scores_parallel(a...); });
}

IclSelection select_icl_serial(std::span<const CandidateExample> pool, const EmbeddingVector& text,
                               const EmbeddingVector& image, int k) {
  return select_with(pool, text, image, k, [](auto&&... a) { return kernels::dual_scores_serial(a...); });
}

std::string render_icl_block(const IclSelection& selection) {
  std::string out;
  for (std::size_t i = 0; i < selection.examples.size(); ++i) {
    const auto& ex = selection.examples[i];
    if (i) out += "\n\n";
    out += "Example " + std::to_string(i + 1) + ":\nImage description: " + ex.caption +
           "\nQuestion: " + ex.question + "\nAnswer: " + ex.answer;
  }
  return out;
}

}  // namespace vqa::fewshot
