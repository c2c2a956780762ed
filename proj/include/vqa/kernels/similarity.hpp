#pragma once

#include <cstddef>
#include <span>
#include <vector>

/// Similarity scoring kernels. Every parallel kernel has a serial twin that
/// computes each element with identical arithmetic; tests compare them
/// bit-for-bit and the benchmark target times them against each other.
namespace vqa::kernels {

using Rows = std::span<const std::vector<double>>;

/// Cosine similarity; 0 when either vector has zero norm. Sizes must match.
double cosine(std::span<const double> a, std::span<const double> b);

std::vector<double> cosine_to_query_serial(std::span<const double> query, Rows rows);
std::vector<double> cosine_to_query_parallel(std::span<const double> query, Rows rows);

/// score_i = (cos(text_query, text_rows[i]) + cos(image_query, image_rows[i])) / 2
std::vector<double> dual_scores_serial(std::span<const double> text_query,
                                       std::span<const double> image_query, Rows text_rows,
                                       Rows image_rows);
std::vector<double> dual_scores_parallel(std::span<const double> text_query,
                                         std::span<const double> image_query, Rows text_rows,
                                         Rows image_rows);

/// Indices of the `k` largest scores, highest first; equal scores keep
/// ascending index order. `k` larger than the input returns every index.
std::vector<std::size_t> top_k_indices(std::span<const double> scores, std::size_t k);

}  // namespace vqa::kernels
