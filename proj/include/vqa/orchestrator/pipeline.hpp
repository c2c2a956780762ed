#pragma once

#include <memory>
#include <vector>

#include "vqa/agents/agents.hpp"
#include "vqa/core/answers.hpp"
#include "vqa/core/config.hpp"
#include "vqa/fewshot/fewshot.hpp"
#include "vqa/gateway/factory.hpp"
#include "vqa/knowledge/graph.hpp"
#include "vqa/orchestrator/trace.hpp"

namespace vqa::orchestrator {

struct AgentBackends {
  /// The multimodal model: captions, direct answers, sub-question answers.
  std::shared_ptr<gateway::ChatBackend> perceiver;
  std::shared_ptr<gateway::ChatBackend> explorer;
  std::shared_ptr<gateway::ChatBackend> reasoner;
  std::shared_ptr<gateway::ChatBackend> evaluator;
  std::shared_ptr<gateway::ChatBackend> retriever;
  /// Shared by knowledge filtering and few-shot selection.
  std::shared_ptr<gateway::EmbeddingProvider> text_embedder;
  std::shared_ptr<gateway::EmbeddingProvider> image_embedder;

  /// Binds every configured role. Missing bindings stay null.
  static AgentBackends from_config(const RunConfig& config, gateway::BackendFactory& factory);

  /// True if any backend serves responses in a fixed order.
  bool any_ordered() const;
};

/// Read-only inputs shared by every sample in a run.
struct Resources {
  agents::PromptLibrary prompts = agents::PromptLibrary::builtin();
  knowledge::KnowledgeGraph graph;
  knowledge::RelationPhrases phrases = knowledge::RelationPhrases::builtin();
  std::vector<fewshot::CandidateExample> pool;
  YesNoLexicon lexicon;

  /// Loads whatever the config points at (graph, phrases, prompts, pool, lexicon).
  static Resources from_config(const RunConfig& config);
};

/// The adaptive reasoning loop: perceive, reason, evaluate, then explore +
/// retrieve + re-reason + re-evaluate until the confidence threshold or the
/// iteration budget is reached.
class Pipeline {
 public:
  /// Throws ConfigError when a backend needed by this configuration is unbound.
  Pipeline(RunConfig config, AgentBackends backends, std::shared_ptr<const Resources> resources);

  /// Never throws for model or backend failures; they mark the trace failed.
  Trace run(const Sample& sample) const;

  const RunConfig& config() const noexcept { return config_; }
  const AgentBackends& backends() const noexcept { return backends_; }

 private:
  RunConfig config_;
  AgentBackends backends_;
  std::shared_ptr<const Resources> resources_;
};

}  // namespace vqa::orchestrator
