#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vqa/core/types.hpp"

namespace vqa {

/// Words that count as a yes/no-type answer. Defaults to exactly {yes} and
/// {no}; a lexicon file (`word<TAB>yes|no` per line) can extend it.
struct YesNoLexicon {
  std::set<std::string> yes{"yes"};
  std::set<std::string> no{"no"};

  static YesNoLexicon load(const std::filesystem::path& path);
};

/// "Yes" or "No" for the first lexicon token in `text`.
std::optional<std::string> first_yes_no(std::string_view text, const YesNoLexicon& lexicon);

/// Label ("A", "B", ...) of the first token that is an option letter or the
/// start of an exact (case-insensitive) option text.
std::optional<std::string> first_option_label(std::string_view text,
                                              const std::vector<std::string>& options);

/// Closed: first yes/no word. MultiChoice: first option label. Open: nullopt.
std::optional<std::string> normalize_closed_answer(std::string_view text, QuestionKind kind,
                                                   const std::vector<std::string>& options,
                                                   const YesNoLexicon& lexicon = {});

}  // namespace vqa
