#include "vqa/kernels/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vqa::kernels {

namespace {

constexpr std::ptrdiff_t kParallelMinRows = 64;

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> cosine_to_query_serial(std::span<const double> query, Rows rows) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = cosine(query, rows[i]);
  return out;
}

std::vector<double> cosine_to_query_parallel(std::span<const double> query, Rows rows) {
  std::vector<double> out(rows.size());
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMinRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = cosine(query, rows[i]);
  return out;
}

std::vector<double> dual_scores_serial(std::span<const double> text_query,
                                       std::span<const double> image_query, Rows text_rows,
                                       Rows image_rows) {
  std::vector<double> out(text_rows.size());
  for (std::size_t i = 0; i < text_rows.size(); ++i) {
    out[i] = 0.5 * (cosine(text_query, text_rows[i]) + cosine(image_query, image_rows[i]));
  }
  return out;
}

std::vector<double> dual_scores_parallel(std::span<const double> text_query,
                                         std::span<const double> image_query, Rows text_rows,
                                         Rows image_rows) {
  std::vector<double> out(text_rows.size());
  const auto n = static_cast<std::ptrdiff_t>(text_rows.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMinRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = 0.5 * (cosine(text_query, text_rows[i]) + cosine(image_query, image_rows[i]));
  }
  return out;
}

std::vector<std::size_t> top_k_indices(std::span<const double> scores, std::size_t k) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, idx.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
  idx.resize(k);
  return idx;
}

}  // namespace vqa::kernels
