#include "vqa/core/answers.hpp"

#include <fstream>

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa {

YesNoLexicon YesNoLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon file '" + path.string() + "'");
  YesNoLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto parts = text::split(t, '\t');
    if (parts.size() != 2) throw ParseError("lexicon: expected word<TAB>yes|no", line_no);
    auto word = text::to_lower(text::trim(parts[0]));
    auto polarity = text::to_lower(text::trim(parts[1]));
    if (word.empty() || word.find(' ') != std::string::npos) {
      throw ParseError("lexicon: word must be a single token", line_no);
    }
    if (polarity == "yes") lex.yes.insert(word);
    else if (polarity == "no") lex.no.insert(word);
    else throw ParseError("lexicon: polarity must be yes or no", line_no);
    if (lex.yes.count(word) && lex.no.count(word)) {
      throw ParseError("lexicon: '" + word + "' listed as both yes and no", line_no);
    }
  }
  return lex;
}

std::optional<std::string> first_yes_no(std::string_view s, const YesNoLexicon& lexicon) {
  for (const auto& tok : text::tokenize(s)) {
    if (lexicon.yes.count(tok)) return "Yes";
    if (lexicon.no.count(tok)) return "No";
  }
  return std::nullopt;
}

std::optional<std::string> first_option_label(std::string_view s,
                                              const std::vector<std::string>& options) {
  const auto tokens = text::tokenize(s);
  std::vector<std::vector<std::string>> option_tokens;
  option_tokens.reserve(options.size());
  for (const auto& o : options) option_tokens.push_back(text::tokenize(o));

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& tok = tokens[i];
    if (tok.size() == 1 && tok[0] >= 'a' && tok[0] < static_cast<char>('a' + options.size())) {
      return option_label(static_cast<std::size_t>(tok[0] - 'a'));
    }
    for (std::size_t o = 0; o < option_tokens.size(); ++o) {
      const auto& ot = option_tokens[o];
      if (ot.empty() || i + ot.size() > tokens.size()) continue;
      if (std::equal(ot.begin(), ot.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        return option_label(o);
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> normalize_closed_answer(std::string_view s, QuestionKind kind,
                                                   const std::vector<std::string>& options,
                                                   const YesNoLexicon& lexicon) {
  switch (kind) {
    case QuestionKind::Closed: return first_yes_no(s, lexicon);
    case QuestionKind::MultiChoice: return first_option_label(s, options);
    case QuestionKind::Open: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace vqa
