#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vqa/agents/prompts.hpp"
#include "vqa/gateway/chat.hpp"
#include "vqa/knowledge/graph.hpp"

namespace vqa::knowledge {

inline constexpr std::size_t kMaxConcepts = 10;

gateway::ChatRequest extraction_request(const agents::PromptLibrary& prompts,
                                        const std::string& context);

/// Nonempty lines with list markers ("-", "*", "N.", "N)") stripped,
/// de-duplicated case-insensitively keeping the first spelling, at most
/// kMaxConcepts.
std::vector<std::string> parse_concepts(std::string_view response);

std::vector<std::string> extract_concepts(gateway::ChatBackend& llm,
                                          const agents::PromptLibrary& prompts,
                                          const std::string& context);

/// Keeps facts with cos(embed(fact), embed(query)) >= min_similarity, sorted
/// by similarity (descending, then fact text ascending), first `top_n`.
std::vector<VerbalizedFact> filter_facts(std::vector<VerbalizedFact> facts,
                                         const std::string& query_context,
                                         gateway::EmbeddingProvider& embedder, int top_n,
                                         double min_similarity);

struct RetrievalRequest {
  std::string question;
  std::string caption;
  std::string history;
  int top_n = 5;
  double min_similarity = 0.0;
};

/// Text the concept extractor sees: question, caption and rendered history.
std::string extraction_context(const RetrievalRequest& request);

/// Concept extraction, direct-edge lookup, verbalization, embedding filter.
/// Returns the surviving fact texts joined by newlines, or "" when any stage
/// comes up empty. An empty graph short-circuits before any model call.
std::string retrieve(gateway::ChatBackend& llm, gateway::EmbeddingProvider& embedder,
                     const KnowledgeGraph& graph, const RelationPhrases& phrases,
                     const agents::PromptLibrary& prompts, const RetrievalRequest& request);

}  // namespace vqa::knowledge
