#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vqa {

enum class AgentRole { Perceiver, Reasoner, Evaluator, Explorer, Retriever };

inline constexpr AgentRole kAllRoles[] = {AgentRole::Perceiver, AgentRole::Reasoner,
                                          AgentRole::Evaluator, AgentRole::Explorer,
                                          AgentRole::Retriever};

std::string_view to_string(AgentRole role);
/// Case-insensitive; throws ParseError on an unknown name.
AgentRole parse_agent_role(std::string_view name);

enum class QuestionKind { Closed, Open, MultiChoice };

std::string_view to_string(QuestionKind kind);
/// Accepts "closed", "open", "multi_choice" (also "yes/no" and "multichoice").
QuestionKind parse_question_kind(std::string_view name);

/// Opaque reference to an image: a file path or URL. Only the gateway
/// resolves it.
class ImageRef {
 public:
  ImageRef() = default;
  explicit ImageRef(std::string ref) : ref_(std::move(ref)) {}

  const std::string& str() const noexcept { return ref_; }
  bool empty() const noexcept { return ref_.empty(); }
  bool is_url() const;

  friend bool operator==(const ImageRef&, const ImageRef&) = default;
  friend auto operator<=>(const ImageRef&, const ImageRef&) = default;

 private:
  std::string ref_;
};

struct Sample {
  std::string id;
  ImageRef image;
  std::string question;
  QuestionKind kind = QuestionKind::Closed;
  std::optional<std::string> ground_truth;
  std::vector<std::string> options;

  /// Throws DatasetError when an invariant does not hold.
  void validate() const;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Option label for position `index` ("A", "B", ...).
std::string option_label(std::size_t index);

/// The question as shown to models: multi-choice questions get their
/// options appended as "Options: (A) ... (B) ...".
std::string question_with_options(const Sample& sample);

}  // namespace vqa
