#include "vqa/core/types.hpp"

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa {

std::string_view to_string(AgentRole role) {
  switch (role) {
    case AgentRole::Perceiver: return "Perceiver";
    case AgentRole::Reasoner: return "Reasoner";
    case AgentRole::Evaluator: return "Evaluator";
    case AgentRole::Explorer: return "Explorer";
    case AgentRole::Retriever: return "Retriever";
  }
  return "?";
}

AgentRole parse_agent_role(std::string_view name) {
  const auto lower = text::to_lower(text::trim(name));
  for (auto role : kAllRoles) {
    if (text::to_lower(to_string(role)) == lower) return role;
  }
  throw ParseError("unknown agent role '" + std::string(name) + "'");
}

std::string_view to_string(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::Closed: return "closed";
    case QuestionKind::Open: return "open";
    case QuestionKind::MultiChoice: return "multi_choice";
  }
  return "?";
}

QuestionKind parse_question_kind(std::string_view name) {
  const auto lower = text::to_lower(text::trim(name));
  if (lower == "closed" || lower == "yes/no") return QuestionKind::Closed;
  if (lower == "open") return QuestionKind::Open;
  if (lower == "multi_choice" || lower == "multichoice") return QuestionKind::MultiChoice;
  throw ParseError("unknown question kind '" + std::string(name) + "'");
}

bool ImageRef::is_url() const {
  return ref_.rfind("http://", 0) == 0 || ref_.rfind("https://", 0) == 0 ||
         ref_.rfind("data:", 0) == 0;
}

void Sample::validate() const {
  if (id.empty()) throw DatasetError("sample id must be nonempty");
  if (question.empty()) throw DatasetError("sample '" + id + "' has an empty question");
  if (kind == QuestionKind::MultiChoice && options.size() < 2) {
    throw DatasetError("multi-choice sample '" + id + "' needs at least 2 options");
  }
  if (kind != QuestionKind::MultiChoice && !options.empty()) {
    throw DatasetError("sample '" + id + "' has options but is not multi-choice");
  }
  if (options.size() > 26) throw DatasetError("sample '" + id + "' has more than 26 options");
}

std::string option_label(std::size_t index) {
  return std::string(1, static_cast<char>('A' + index));
}

std::string question_with_options(const Sample& sample) {
  if (sample.kind != QuestionKind::MultiChoice) return sample.question;
  std::string out = sample.question + "\nOptions:";
  for (std::size_t i = 0; i < sample.options.size(); ++i) {
    out += " (" + option_label(i) + ") " + sample.options[i];
  }
  return out;
}

}  // namespace vqa
