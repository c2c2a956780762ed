#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vqa/core/answers.hpp"
#include "vqa/core/types.hpp"

namespace vqa::harness {

/// Strict closed-ended accuracy: only the first yes/no-type word of the
/// response counts (first option label when `options` is nonempty).
/// Returns 1 on a match, 0 otherwise, including when no such word appears.
/// Throws DatasetError if the ground truth itself cannot be normalized.
int score_closed(std::string_view response, std::string_view ground_truth,
                 const std::vector<std::string>& options = {}, const YesNoLexicon& lexicon = {});

/// Fraction of unique ground-truth tokens that occur in the response.
double score_open(std::string_view response, std::string_view ground_truth);

/// Normalized ground truth: "Yes"/"No", or an option label.
std::string normalize_ground_truth(std::string_view ground_truth,
                                   const std::vector<std::string>& options,
                                   const YesNoLexicon& lexicon = {});

/// Dispatches on the sample kind. Requires a ground truth.
double score_sample(const Sample& sample, std::string_view response, const YesNoLexicon& lexicon = {});

}  // namespace vqa::harness
