#include "vqa/harness/metrics.hpp"

#include <set>

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa::harness {

std::string normalize_ground_truth(std::string_view ground_truth,
                                   const std::vector<std::string>& options,
                                   const YesNoLexicon& lexicon) {
  if (options.empty()) {
    if (auto yn = first_yes_no(ground_truth, lexicon)) return *yn;
    throw DatasetError("ground truth '" + std::string(ground_truth) + "' is not a yes/no answer");
  }
  const auto gt = text::to_lower(text::trim(ground_truth));
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (gt == text::to_lower(option_label(i)) || gt == text::to_lower(text::trim(options[i]))) {
      return option_label(i);
    }
  }
  if (auto label = first_option_label(ground_truth, options)) return *label;
  throw DatasetError("ground truth '" + std::string(ground_truth) + "' matches no option");
}

int score_closed(std::string_view response, std::string_view ground_truth,
                 const std::vector<std::string>& options, const YesNoLexicon& lexicon) {
  const auto expected = normalize_ground_truth(ground_truth, options, lexicon);
  const auto predicted = options.empty() ? first_yes_no(response, lexicon)
                                         : first_option_label(response, options);
  return predicted && *predicted == expected ? 1 : 0;
}

double score_open(std::string_view response, std::string_view ground_truth) {
  const auto gt_tokens = text::tokenize(ground_truth);
  const std::set<std::string> gt(gt_tokens.begin(), gt_tokens.end());
  if (gt.empty()) return 0.0;
  const auto resp_tokens = text::tokenize(response);
  const std::set<std::string> resp(resp_tokens.begin(), resp_tokens.end());
  std::size_t hit = 0;
  for (const auto& t : gt) hit += resp.count(t);
  return static_cast<double>(hit) / static_cast<double>(gt.size());
}

double score_sample(const Sample& sample, std::string_view response, const YesNoLexicon& lexicon) {
  if (!sample.ground_truth) throw DatasetError("sample '" + sample.id + "' has no ground truth");
  switch (sample.kind) {
    case QuestionKind::Open: return score_open(response, *sample.ground_truth);
    case QuestionKind::Closed: return score_closed(response, *sample.ground_truth, {}, lexicon);
    case QuestionKind::MultiChoice:
      return score_closed(response, *sample.ground_truth, sample.options, lexicon);
  }
  return 0.0;
}

}  // namespace vqa::harness
