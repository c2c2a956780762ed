#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vqa/agents/agents.hpp"
#include "vqa/core/history.hpp"

namespace vqa::orchestrator {

enum class StopReason { ConfidenceMet, MaxIterations };

std::string_view to_string(StopReason reason);
StopReason parse_stop_reason(std::string_view name);

enum class CallKind { Chat, EmbedText, EmbedImage };

std::string_view to_string(CallKind kind);

struct CallRecord {
  AgentRole role = AgentRole::Perceiver;
  CallKind kind = CallKind::Chat;
  bool cache_hit = false;

  friend bool operator==(const CallRecord&, const CallRecord&) = default;
};

struct IterationRecord {
  int iteration = 1;
  std::vector<agents::SubQA> sub_qas;
  std::string rag_context;
  agents::ReasonedAnswer reasoned;
  agents::Confidence confidence;
  /// Degraded-iteration notes (empty decomposition, format errors).
  std::vector<std::string> warnings;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

/// Everything that happened while answering one sample. A failed trace keeps
/// whatever was produced before the failure.
struct Trace {
  std::string sample_id;
  QuestionKind kind = QuestionKind::Closed;
  std::string caption;
  std::string initial_answer;
  std::optional<agents::ReasonedAnswer> initial_reasoned;
  std::optional<agents::Confidence> initial_confidence;
  std::vector<std::string> initial_warnings;
  std::vector<std::string> icl_example_ids;
  std::vector<IterationRecord> iterations;
  std::string final_answer;
  std::optional<std::string> final_normalized;
  std::optional<StopReason> stop_reason;
  std::vector<CallRecord> backend_call_log;
  std::vector<ReasoningEntry> history;
  bool failed = false;
  std::string error;

  /// Score of the last evaluation, pre-loop included.
  std::optional<int> last_score() const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Canonical document: object keys sorted, every field present.
nlohmann::json serialize_trace(const Trace& trace);
Trace parse_trace(const nlohmann::json& doc);
/// Two-space indented text of serialize_trace with a trailing newline.
std::string trace_to_text(const Trace& trace);

}  // namespace vqa::orchestrator
