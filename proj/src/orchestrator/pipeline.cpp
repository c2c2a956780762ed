#include "vqa/orchestrator/pipeline.hpp"

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"
#include "vqa/knowledge/retriever.hpp"

namespace vqa::orchestrator {

namespace {

/// Forwards to a shared backend and logs every call into one trace.
class RecordingChat final : public gateway::ChatBackend {
 public:
  RecordingChat(gateway::ChatBackend& inner, std::vector<CallRecord>& log) : inner_(inner), log_(log) {}

  gateway::Completion complete(AgentRole caller, const gateway::ChatRequest& request) override {
    auto out = inner_.complete(caller, request);
    log_.push_back({caller, CallKind::Chat, out.cache_hit});
    return out;
  }
  std::string model_id() const override { return inner_.model_id(); }

 private:
  gateway::ChatBackend& inner_;
  std::vector<CallRecord>& log_;
};

class RecordingEmbedder final : public gateway::EmbeddingProvider {
 public:
  RecordingEmbedder(gateway::EmbeddingProvider& inner, AgentRole role, std::vector<CallRecord>& log)
      : inner_(inner), role_(role), log_(log) {}

  gateway::EmbeddingResult embed_text(const std::string& text) override {
    auto out = inner_.embed_text(text);
    log_.push_back({role_, CallKind::EmbedText, out.cache_hit});
    return out;
  }
  gateway::EmbeddingResult embed_image(const ImageRef& image) override {
    auto out = inner_.embed_image(image);
    log_.push_back({role_, CallKind::EmbedImage, out.cache_hit});
    return out;
  }
  std::string model_id() const override { return inner_.model_id(); }

 private:
  gateway::EmbeddingProvider& inner_;
  AgentRole role_;
  std::vector<CallRecord>& log_;
};

std::string confidence_entry(const agents::Confidence& c) {
  return "Score: " + std::to_string(c.score) + "\nExplanation: " + c.explanation;
}

}  // namespace

AgentBackends AgentBackends::from_config(const RunConfig& config, gateway::BackendFactory& factory) {
  AgentBackends b;
  auto bind = [&](AgentRole role) -> std::shared_ptr<gateway::ChatBackend> {
    auto spec = config.backend_for(role);
    return spec ? factory.chat(*spec) : nullptr;
  };
  b.perceiver = bind(AgentRole::Perceiver);
  b.explorer = bind(AgentRole::Explorer);
  b.reasoner = bind(AgentRole::Reasoner);
  b.evaluator = bind(AgentRole::Evaluator);
  b.retriever = bind(AgentRole::Retriever);
  if (config.text_embedder) b.text_embedder = factory.embedder(*config.text_embedder);
  if (config.image_embedder) b.image_embedder = factory.embedder(*config.image_embedder);
  return b;
}

bool AgentBackends::any_ordered() const {
  for (const auto* b : {perceiver.get(), explorer.get(), reasoner.get(), evaluator.get(), retriever.get()}) {
    if (b && b->is_ordered()) return true;
  }
  return false;
}

Resources Resources::from_config(const RunConfig& config) {
  Resources r;
  if (config.prompts_dir) r.prompts = agents::PromptLibrary::load(*config.prompts_dir);
  if (config.kg_path) r.graph = knowledge::load_kg(*config.kg_path);
  if (config.relation_phrases_path) r.phrases = knowledge::RelationPhrases::load(*config.relation_phrases_path);
  if (config.pool_path) r.pool = fewshot::read_pool(*config.pool_path);
  if (config.lexicon_path) r.lexicon = YesNoLexicon::load(*config.lexicon_path);
  return r;
}

Pipeline::Pipeline(RunConfig config, AgentBackends backends, std::shared_ptr<const Resources> resources)
    : config_(std::move(config)), backends_(std::move(backends)), resources_(std::move(resources)) {
  config_.validate();
  if (!resources_) throw ConfigError("pipeline needs resources");
  auto require = [](const auto& ptr, const char* what) {
    if (!ptr) throw ConfigError(std::string("no backend bound for ") + what);
  };
  require(backends_.perceiver, "[backend.perceiver]");
  require(backends_.explorer, "[backend.explorer]");
  require(backends_.reasoner, "[backend.reasoner]");
  require(backends_.evaluator, "[backend.evaluator]");
  if (!resources_->graph.empty()) {
    require(backends_.retriever, "[backend.retriever] (a knowledge graph is configured)");
    require(backends_.text_embedder, "[embedder.text] (a knowledge graph is configured)");
  }
  if (config_.k_shot > 0) {
    if (resources_->pool.empty()) {
      throw ConfigError("k_shot > 0 needs a nonempty few-shot pool (config key 'pool_path')");
    }
    require(backends_.text_embedder, "[embedder.text] (k_shot > 0)");
    require(backends_.image_embedder, "[embedder.image] (k_shot > 0)");
  }
}

Trace Pipeline::run(const Sample& sample) const {
  const auto& res = *resources_;
  const auto& prompts = res.prompts;
  Trace t;
  t.sample_id = sample.id;
  t.kind = sample.kind;
  ReasoningHistory history;

  RecordingChat mllm(*backends_.perceiver, t.backend_call_log);
  RecordingChat explorer(*backends_.explorer, t.backend_call_log);
  RecordingChat reasoner(*backends_.reasoner, t.backend_call_log);
  RecordingChat evaluator(*backends_.evaluator, t.backend_call_log);

  auto rendered_history = [&] {
    auto text = history.render();
    if (config_.max_history_chars && text.size() > config_.max_history_chars) {
      throw HistoryOverflowError("reasoning history is " + std::to_string(text.size()) +
                                 " bytes, above max_history_chars = " +
                                 std::to_string(config_.max_history_chars));
    }
    return text;
  };

  const auto question = question_with_options(sample);
  std::string icl_block;

  // Runs reasoner then evaluator for one pass. On a reasoner format error the
  // previous answer is kept and the pass scores 1 without calling the evaluator.
  auto reason_and_evaluate = [&](int iteration, const agents::ReasonedAnswer& previous,
                                 const std::string& rag_context, std::vector<std::string>& warnings)
      -> std::pair<agents::ReasonedAnswer, agents::Confidence> {
    agents::ReasonInputs in{sample.kind,         question, sample.options, t.caption, t.initial_answer,
                            rendered_history(), rag_context, icl_block};
    agents::ReasonedAnswer answer;
    try {
      answer = agents::reason(reasoner, prompts, in, res.lexicon);
    } catch (const AnswerFormatError& e) {
      warnings.push_back(std::string("reasoner: ") + e.what() + "; kept previous answer");
      return {previous, {1, "reasoner response was unparseable"}};
    }
    history.append({AgentRole::Reasoner, iteration, "answer",
                    agents::format_reasoned_answer(answer.analysis, answer.answer)});
    agents::Confidence confidence;
    try {
      confidence = agents::evaluate(
          evaluator, prompts, {question, t.caption, answer.answer, rendered_history(), icl_block});
    } catch (const ScoreFormatError& e) {
      warnings.push_back(std::string("evaluator: ") + e.what() + "; scored 1");
      confidence = {1, "evaluator response was unparseable"};
    }
    history.append({AgentRole::Evaluator, iteration, "confidence", confidence_entry(confidence)});
    return {std::move(answer), std::move(confidence)};
  };

  try {
    auto perception = agents::perceive(mllm, prompts, sample.image, question,
                                       derive_seed(config_.rng_seed, sample.id));
    t.caption = perception.caption;
    t.initial_answer = perception.initial_answer;
    history.append({AgentRole::Perceiver, 0, "caption", t.caption});
    history.append({AgentRole::Perceiver, 0, "initial_answer", t.initial_answer});

    if (config_.k_shot > 0) {
      RecordingEmbedder text_emb(*backends_.text_embedder, AgentRole::Reasoner, t.backend_call_log);
      RecordingEmbedder image_emb(*backends_.image_embedder, AgentRole::Reasoner, t.backend_call_log);
      auto selection = fewshot::select_icl(res.pool, text_emb.embed_text(question).vector,
                                           image_emb.embed_image(sample.image).vector, config_.k_shot);
      for (const auto& ex : selection.examples) t.icl_example_ids.push_back(ex.id);
      icl_block = fewshot::render_icl_block(selection);
    }

    const agents::ReasonedAnswer seed_answer{
        "", t.initial_answer,
        normalize_closed_answer(t.initial_answer, sample.kind, sample.options, res.lexicon)};
    agents::ReasonedAnswer current;
    agents::Confidence confidence;
    std::tie(current, confidence) = reason_and_evaluate(0, seed_answer, "", t.initial_warnings);
    t.initial_reasoned = current;
    t.initial_confidence = confidence;
    t.final_answer = current.answer;
    t.final_normalized = current.normalized;

    int completed = 0;
    auto keep_going = [&] {
      if (config_.fixed_iterations > 0) return completed < config_.fixed_iterations;
      return confidence.score < config_.confidence_threshold && completed < config_.max_iterations;
    };
    while (keep_going()) {
      IterationRecord rec;
      rec.iteration = completed + 1;

      try {
        rec.sub_qas = agents::explore(explorer, mllm, prompts, sample.image, question, t.caption,
                                      rendered_history(), config_.max_sub_questions);
      } catch (const EmptyDecompositionError& e) {
        rec.warnings.push_back(std::string("explorer: ") + e.what());
      }
      for (const auto& s : rec.sub_qas) {
        history.append({AgentRole::Explorer, rec.iteration, "sub_qa", "Q: " + s.question + "\nA: " + s.answer});
      }

      if (!res.graph.empty()) {
        RecordingChat retriever(*backends_.retriever, t.backend_call_log);
        RecordingEmbedder embedder(*backends_.text_embedder, AgentRole::Retriever, t.backend_call_log);
        rec.rag_context = knowledge::retrieve(
            retriever, embedder, res.graph, res.phrases, prompts,
            {sample.question, t.caption, rendered_history(), config_.retrieval_top_n,
             config_.retrieval_min_similarity});
      }
      if (!rec.rag_context.empty()) {
        history.append({AgentRole::Retriever, rec.iteration, "rag_context", rec.rag_context});
      }

      std::tie(rec.reasoned, rec.confidence) =
          reason_and_evaluate(rec.iteration, current, rec.rag_context, rec.warnings);
      current = rec.reasoned;
      confidence = rec.confidence;
      t.final_answer = current.answer;
      t.final_normalized = current.normalized;
      t.iterations.push_back(std::move(rec));
      ++completed;
    }
    t.stop_reason = confidence.score >= config_.confidence_threshold ? StopReason::ConfidenceMet
                                                                      : StopReason::MaxIterations;
  } catch (const Error& e) {
    t.failed = true;
    t.error = e.what();
  } catch (const std::exception& e) {
    t.failed = true;
    t.error = std::string("unexpected error: ") + e.what();
  }
  t.history.assign(history.entries().begin(), history.entries().end());
  return t;
}

}  // namespace vqa::orchestrator
