#include <regex>

#include "vqa/agents/agents.hpp"
#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa::agents {

using gateway::MessageRole;

ChatRequest evaluator_request(const PromptLibrary& prompts, const EvaluateInputs& in) {
  const Bindings b = {{"caption", in.caption},
                      {"question", in.question},
                      {"answer", in.answer},
                      {"history", in.history}};
  ChatRequest req;
  req.messages.push_back({MessageRole::System, prompts.get("evaluator_system").render(b), {}});
  req.messages.push_back(
      {MessageRole::User, with_examples(prompts.get("evaluator_user").render(b), in.icl_block), {}});
  return req;
}

Confidence parse_confidence(std::string_view response) {
  static const std::regex score_re(R"(^[\s\*#]*(?:confiden\w*\s+)?score\s*\**\s*:\s*\**\s*(-?\d+))",
                                   std::regex::icase);
  static const std::regex expl_re(R"(explanation\s*\**\s*:\s*\**)", std::regex::icase);

  const auto lines = text::split_lines(response);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_search(lines[i], m, score_re)) continue;
    const auto digits = m[1].str();
    int score = 0;
    try {
      score = digits.size() > 3 ? 0 : std::stoi(digits);
    } catch (const std::exception&) {
      score = 0;
    }
    if (score < 1 || score > 5) {
      throw ScoreFormatError("evaluator score " + digits + " is outside 1..5", std::string(response));
    }
    std::vector<std::string> rest{lines[i].substr(static_cast<std::size_t>(m.position(0) + m.length(0)))};
    rest.insert(rest.end(), lines.begin() + static_cast<std::ptrdiff_t>(i) + 1, lines.end());
    auto remainder = text::join(rest, "\n");
    std::smatch em;
    if (std::regex_search(remainder, em, expl_re)) {
      remainder = em.suffix().str();
    }
    return {score, text::trim(remainder)};
  }
  throw ScoreFormatError("evaluator response has no 'Score: <n>' line", std::string(response));
}

Confidence evaluate(ChatBackend& llm, const PromptLibrary& prompts, const EvaluateInputs& in) {
  return parse_confidence(llm.complete(AgentRole::Evaluator, evaluator_request(prompts, in)).text);
}

}  // namespace vqa::agents
