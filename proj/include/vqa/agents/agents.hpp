#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vqa/agents/prompts.hpp"
#include "vqa/core/answers.hpp"
#include "vqa/core/types.hpp"
#include "vqa/gateway/chat.hpp"

namespace vqa::agents {

using gateway::ChatBackend;
using gateway::ChatRequest;

// Perceiver ------------------------------------------------------------------

struct Perception {
  std::string caption;
  std::string initial_answer;
  std::size_t caption_prompt_index = 0;
};

/// Uniform pick among `count` caption prompts for `seed`.
std::size_t caption_prompt_index(std::uint64_t seed, std::size_t count);

ChatRequest caption_request(const PromptLibrary& prompts, const ImageRef& image,
                            std::size_t prompt_index);
ChatRequest direct_answer_request(const ImageRef& image, const std::string& question);

/// Caption only; used when building few-shot pools.
std::string describe_image(ChatBackend& mllm, const PromptLibrary& prompts, const ImageRef& image,
                           std::uint64_t seed);

/// Caption plus the multimodal model's direct answer, both from `mllm`.
Perception perceive(ChatBackend& mllm, const PromptLibrary& prompts, const ImageRef& image,
                    const std::string& question, std::uint64_t seed);

// Explorer -------------------------------------------------------------------

enum class SubQuestionLevel { GeneralObservation, AnatomicalAnalysis, DetailedFinding };

std::string_view to_string(SubQuestionLevel level);
SubQuestionLevel parse_sub_question_level(std::string_view name);
/// 1 -> GeneralObservation, 2 -> AnatomicalAnalysis, 3+ -> DetailedFinding.
SubQuestionLevel level_for_position(std::size_t position);

struct SubQA {
  SubQuestionLevel level = SubQuestionLevel::GeneralObservation;
  std::string question;
  std::string answer;

  friend bool operator==(const SubQA&, const SubQA&) = default;
};

ChatRequest explorer_request(const PromptLibrary& prompts, const std::string& question,
                             const std::string& caption, const std::string& history,
                             int max_sub_questions);

/// Questions from "Sub-question N: ..." lines, in order, at most `max`.
std::vector<std::string> parse_sub_questions(std::string_view response, int max);

/// Decomposes the question with `llm` and answers each sub-question with
/// `mllm` looking at the image. Throws EmptyDecompositionError when the
/// response has no sub-question lines.
std::vector<SubQA> explore(ChatBackend& llm, ChatBackend& mllm, const PromptLibrary& prompts,
                           const ImageRef& image, const std::string& question,
                           const std::string& caption, const std::string& history,
                           int max_sub_questions);

// Reasoner -------------------------------------------------------------------

struct ReasonedAnswer {
  std::string analysis;
  std::string answer;
  /// "Yes"/"No" for closed questions, an option label for multi-choice.
  std::optional<std::string> normalized;

  friend bool operator==(const ReasonedAnswer&, const ReasonedAnswer&) = default;
};

struct ReasonInputs {
  QuestionKind kind = QuestionKind::Closed;
  /// As shown to the model (multi-choice options already appended).
  std::string question;
  std::vector<std::string> options;
  std::string caption;
  std::string initial_answer;
  std::string history;
  std::string rag_context;
  std::string icl_block;
};

ChatRequest reasoner_request(const PromptLibrary& prompts, const ReasonInputs& in);

/// The answer is whatever follows the last line starting with "Answer:";
/// the analysis is the text between "Analysis:" and that line. Throws
/// AnswerFormatError when there is no such line or the answer is empty.
ReasonedAnswer parse_reasoned_answer(std::string_view response, QuestionKind kind,
                                     const std::vector<std::string>& options,
                                     const YesNoLexicon& lexicon = {});

std::string format_reasoned_answer(const std::string& analysis, const std::string& answer);

ReasonedAnswer reason(ChatBackend& llm, const PromptLibrary& prompts, const ReasonInputs& in,
                      const YesNoLexicon& lexicon = {});

// Evaluator ------------------------------------------------------------------

struct Confidence {
  int score = 1;
  std::string explanation;

  friend bool operator==(const Confidence&, const Confidence&) = default;
};

struct EvaluateInputs {
  std::string question;
  std::string caption;
  std::string answer;
  std::string history;
  std::string icl_block;
};

ChatRequest evaluator_request(const PromptLibrary& prompts, const EvaluateInputs& in);

/// Reads the first "Score: <int>" line. Out-of-range or missing scores throw
/// ScoreFormatError; nothing is clamped.
Confidence parse_confidence(std::string_view response);

Confidence evaluate(ChatBackend& llm, const PromptLibrary& prompts, const EvaluateInputs& in);

/// Appends the few-shot block to a user prompt when it is nonempty.
std::string with_examples(std::string user_prompt, const std::string& icl_block);

}  // namespace vqa::agents
