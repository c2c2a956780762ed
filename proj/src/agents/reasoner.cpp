#include "vqa/agents/agents.hpp"

#include <cctype>

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa::agents {

using gateway::MessageRole;

namespace {

/// Position just past `marker` if `line` starts with it (ignoring leading
/// whitespace, '*' and '#', and letter case), npos otherwise.
std::size_t after_marker(const std::string& line, std::string_view marker) {
  std::size_t i = 0;
  while (i < line.size() && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == '*' ||
                             line[i] == '#')) {
    ++i;
  }
  if (line.size() - i < marker.size()) return std::string::npos;
  if (text::to_lower(std::string_view(line).substr(i, marker.size())) != marker) {
    return std::string::npos;
  }
  i += marker.size();
  while (i < line.size() && line[i] == '*') ++i;
  return i;
}

}  // namespace

ChatRequest reasoner_request(const PromptLibrary& prompts, const ReasonInputs& in) {
  const bool open = in.kind == QuestionKind::Open;
  const Bindings b = {{"caption", in.caption},
                      {"question", in.question},
                      {"initial_answer", in.initial_answer},
                      {"history", in.history},
                      {"rag_context", in.rag_context}};
  const std::string prefix = open ? "reasoner_open_" : "reasoner_closed_";
  ChatRequest req;
  req.messages.push_back({MessageRole::System, prompts.get(prefix + "system").render(b), {}});
  req.messages.push_back(
      {MessageRole::User, with_examples(prompts.get(prefix + "user").render(b), in.icl_block), {}});
  return req;
}

ReasonedAnswer parse_reasoned_answer(std::string_view response, QuestionKind kind,
                                     const std::vector<std::string>& options,
                                     const YesNoLexicon& lexicon) {
  const auto lines = text::split_lines(response);
  std::size_t answer_line = lines.size();
  std::size_t answer_col = 0;
  for (std::size_t i = lines.size(); i-- > 0;) {
    auto col = after_marker(lines[i], "answer:");
    if (col != std::string::npos) {
      answer_line = i;
      answer_col = col;
      break;
    }
  }
  if (answer_line == lines.size()) {
    throw AnswerFormatError("reasoner response has no 'Answer:' line", std::string(response));
  }

  std::vector<std::string> answer_parts{lines[answer_line].substr(answer_col)};
  answer_parts.insert(answer_parts.end(), lines.begin() + static_cast<std::ptrdiff_t>(answer_line) + 1,
                      lines.end());
  ReasonedAnswer out;
  out.answer = text::trim(text::join(answer_parts, "\n"));
  if (out.answer.empty()) {
    throw AnswerFormatError("reasoner response has an empty answer", std::string(response));
  }

  for (std::size_t i = 0; i < answer_line; ++i) {
    auto col = after_marker(lines[i], "analysis:");
    if (col == std::string::npos) continue;
    std::vector<std::string> parts{lines[i].substr(col)};
    parts.insert(parts.end(), lines.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                 lines.begin() + static_cast<std::ptrdiff_t>(answer_line));
    out.analysis = text::trim(text::join(parts, "\n"));
    break;
  }
  out.normalized = normalize_closed_answer(out.answer, kind, options, lexicon);
  return out;
}

std::string format_reasoned_answer(const std::string& analysis, const std::string& answer) {
  return "Analysis: " + analysis + "\n\nAnswer: " + answer;
}

ReasonedAnswer reason(ChatBackend& llm, const PromptLibrary& prompts, const ReasonInputs& in,
                      const YesNoLexicon& lexicon) {
  const auto response = llm.complete(AgentRole::Reasoner, reasoner_request(prompts, in)).text;
  return parse_reasoned_answer(response, in.kind, in.options, lexicon);
}

}  // namespace vqa::agents
