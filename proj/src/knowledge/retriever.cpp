#include "vqa/knowledge/retriever.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"
#include "vqa/kernels/similarity.hpp"

namespace vqa::knowledge {

namespace {

std::string strip_list_marker(std::string line) {
  line = text::trim(line);
  if (!line.empty() && (line[0] == '-' || line[0] == '*' || line[0] == '+')) {
    return text::trim(std::string_view(line).substr(1));
  }
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
    return text::trim(std::string_view(line).substr(i + 1));
  }
  return line;
}

}  // namespace

gateway::ChatRequest extraction_request(const agents::PromptLibrary& prompts,
                                        const std::string& context) {
  gateway::ChatRequest req;
  req.messages.push_back({gateway::MessageRole::User,
                          prompts.get("retriever_extract").render({{"context", context}}),
                          {}});
  return req;
}

std::vector<std::string> parse_concepts(std::string_view response) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& line : text::split_lines(response)) {
    auto concept_text = strip_list_marker(line);
    if (concept_text.empty()) continue;
    if (!seen.insert(text::to_lower(concept_text)).second) continue;
    out.push_back(std::move(concept_text));
    if (out.size() == kMaxConcepts) break;
  }
  return out;
}

std::vector<std::string> extract_concepts(gateway::ChatBackend& llm,
                                          const agents::PromptLibrary& prompts,
                                          const std::string& context) {
  if (text::trim(context).empty()) throw Error("concept extraction needs a nonempty context");
  return parse_concepts(llm.complete(AgentRole::Retriever, extraction_request(prompts, context)).text);
}

std::vector<VerbalizedFact> filter_facts(std::vector<VerbalizedFact> facts,
                                         const std::string& query_context,
                                         gateway::EmbeddingProvider& embedder, int top_n,
                                         double min_similarity) {
  if (top_n < 1) throw ConfigError("retrieval top_n must be >= 1");
  if (facts.empty()) return facts;

  const auto query = embedder.embed_text(query_context).vector;
  std::vector<std::vector<double>> rows;
  rows.reserve(facts.size());
  for (const auto& f : facts) {
    auto v = embedder.embed_text(f.text).vector;
    if (v.dim() != query.dim()) {
      throw BackendError("embedding dimension mismatch: fact has " + std::to_string(v.dim()) +
                         ", query has " + std::to_string(query.dim()));
    }
    rows.push_back(std::move(v.values));
  }
  const auto sims = kernels::cosine_to_query_parallel(query.values, rows);

  std::vector<VerbalizedFact> kept;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (sims[i] < min_similarity) continue;
    facts[i].similarity = sims[i];
    kept.push_back(std::move(facts[i]));
  }
  std::sort(kept.begin(), kept.end(), [](const VerbalizedFact& a, const VerbalizedFact& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.text < b.text;
  });
  if (kept.size() > static_cast<std::size_t>(top_n)) kept.resize(static_cast<std::size_t>(top_n));
  return kept;
}

std::string extraction_context(const RetrievalRequest& request) {
  std::string out = "Main question: " + request.question + "\nImage description: " + request.caption;
  if (!request.history.empty()) out += "\nHistory:\n" + request.history;
  return out;
}

std::string retrieve(gateway::ChatBackend& llm, gateway::EmbeddingProvider& embedder,
                     const KnowledgeGraph& graph, const RelationPhrases& phrases,
                     const agents::PromptLibrary& prompts, const RetrievalRequest& request) {
  if (graph.empty()) return "";
  const auto concepts = extract_concepts(llm, prompts, extraction_context(request));
  std::set<Triple> matched;
  for (const auto& c : concepts) {
    for (auto& t : query_subgraph(graph, c)) matched.insert(std::move(t));
  }
  if (matched.empty()) return "";
  const std::vector<Triple> triples(matched.begin(), matched.end());
  auto facts = filter_facts(verbalize(triples, phrases), request.question, embedder,
                            request.top_n, request.min_similarity);
  std::vector<std::string> lines;
  lines.reserve(facts.size());
  for (const auto& f : facts) lines.push_back(f.text);
  return text::join(lines, "\n");
}

}  // namespace vqa::knowledge
