#include <regex>

#include "vqa/agents/agents.hpp"
#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa::agents {

using gateway::ChatMessage;
using gateway::MessageRole;

std::string_view to_string(SubQuestionLevel level) {
  switch (level) {
    case SubQuestionLevel::GeneralObservation: return "GeneralObservation";
    case SubQuestionLevel::AnatomicalAnalysis: return "AnatomicalAnalysis";
    case SubQuestionLevel::DetailedFinding: return "DetailedFinding";
  }
  return "?";
}

SubQuestionLevel parse_sub_question_level(std::string_view name) {
  for (auto level : {SubQuestionLevel::GeneralObservation, SubQuestionLevel::AnatomicalAnalysis,
                     SubQuestionLevel::DetailedFinding}) {
    if (to_string(level) == name) return level;
  }
  throw ParseError("unknown sub-question level '" + std::string(name) + "'");
}

SubQuestionLevel level_for_position(std::size_t position) {
  if (position <= 1) return SubQuestionLevel::GeneralObservation;
  if (position == 2) return SubQuestionLevel::AnatomicalAnalysis;
  return SubQuestionLevel::DetailedFinding;
}

ChatRequest explorer_request(const PromptLibrary& prompts, const std::string& question,
                             const std::string& caption, const std::string& history,
                             int max_sub_questions) {
  const Bindings b = {{"caption", caption},
                      {"question", question},
                      {"history", history},
                      {"max_sub_questions", std::to_string(max_sub_questions)}};
  ChatRequest req;
  req.messages.push_back({MessageRole::System, prompts.get("explorer_system").render(b), {}});
  req.messages.push_back({MessageRole::User, prompts.get("explorer_user").render(b), {}});
  return req;
}

std::vector<std::string> parse_sub_questions(std::string_view response, int max) {
  // Tolerates list bullets and markdown emphasis around the marker.
  static const std::regex line_re(R"(^[\s\-\*]*\**\s*sub-question\s*\d+\s*\**\s*:\s*\**\s*(.*)$)",
                                  std::regex::icase);
  std::vector<std::string> out;
  for (const auto& line : text::split_lines(response)) {
    if (static_cast<int>(out.size()) >= max) break;
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) continue;
    auto q = text::trim(m[1].str());
    if (!q.empty()) out.push_back(std::move(q));
  }
  return out;
}

std::vector<SubQA> explore(ChatBackend& llm, ChatBackend& mllm, const PromptLibrary& prompts,
                           const ImageRef& image, const std::string& question,
                           const std::string& caption, const std::string& history,
                           int max_sub_questions) {
  if (max_sub_questions < 1) throw ConfigError("max_sub_questions must be >= 1");
  const auto response =
      llm.complete(AgentRole::Explorer,
                   explorer_request(prompts, question, caption, history, max_sub_questions))
          .text;
  auto questions = parse_sub_questions(response, max_sub_questions);
  if (questions.empty()) {
    throw EmptyDecompositionError("explorer response contains no 'Sub-question N:' lines", response);
  }
  std::vector<SubQA> out;
  out.reserve(questions.size());
  for (std::size_t i = 0; i < questions.size(); ++i) {
    auto answer = mllm.complete(AgentRole::Explorer, direct_answer_request(image, questions[i])).text;
    out.push_back({level_for_position(i + 1), std::move(questions[i]), text::trim(answer)});
  }
  return out;
}

}  // namespace vqa::agents
