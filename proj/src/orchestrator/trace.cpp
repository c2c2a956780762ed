#include "vqa/orchestrator/trace.hpp"

#include "vqa/core/error.hpp"

namespace vqa::orchestrator {

using nlohmann::json;

std::string_view to_string(StopReason reason) {
  return reason == StopReason::ConfidenceMet ? "ConfidenceMet" : "MaxIterations";
}

StopReason parse_stop_reason(std::string_view name) {
  if (name == "ConfidenceMet") return StopReason::ConfidenceMet;
  if (name == "MaxIterations") return StopReason::MaxIterations;
  throw ParseError("unknown stop reason '" + std::string(name) + "'");
}

std::string_view to_string(CallKind kind) {
  switch (kind) {
    case CallKind::Chat: return "chat";
    case CallKind::EmbedText: return "embed_text";
    case CallKind::EmbedImage: return "embed_image";
  }
  return "?";
}

namespace {

CallKind parse_call_kind(std::string_view name) {
  for (auto k : {CallKind::Chat, CallKind::EmbedText, CallKind::EmbedImage}) {
    if (to_string(k) == name) return k;
  }
  throw ParseError("unknown call kind '" + std::string(name) + "'");
}

json opt_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> get_opt_string(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

json reasoned_json(const agents::ReasonedAnswer& r) {
  return {{"analysis", r.analysis}, {"answer", r.answer}, {"normalized", opt_string(r.normalized)}};
}

agents::ReasonedAnswer reasoned_from(const json& j) {
  return {j.at("analysis").get<std::string>(), j.at("answer").get<std::string>(),
          get_opt_string(j.at("normalized"))};
}

json confidence_json(const agents::Confidence& c) {
  return {{"score", c.score}, {"explanation", c.explanation}};
}

agents::Confidence confidence_from(const json& j) {
  return {j.at("score").get<int>(), j.at("explanation").get<std::string>()};
}

}  // namespace

std::optional<int> Trace::last_score() const {
  if (!iterations.empty()) return iterations.back().confidence.score;
  if (initial_confidence) return initial_confidence->score;
  return std::nullopt;
}

json serialize_trace(const Trace& t) {
  json iterations = json::array();
  for (const auto& it : t.iterations) {
    json subs = json::array();
    for (const auto& s : it.sub_qas) {
      subs.push_back({{"level", agents::to_string(s.level)}, {"question", s.question}, {"answer", s.answer}});
    }
    iterations.push_back({{"iteration", it.iteration},
                          {"sub_qas", std::move(subs)},
                          {"rag_context", it.rag_context},
                          {"reasoned", reasoned_json(it.reasoned)},
                          {"confidence", confidence_json(it.confidence)},
                          {"warnings", it.warnings}});
  }
  json calls = json::array();
  for (const auto& c : t.backend_call_log) {
    calls.push_back({{"role", to_string(c.role)}, {"kind", to_string(c.kind)}, {"cache_hit", c.cache_hit}});
  }
  json history = json::array();
  for (const auto& e : t.history) {
    history.push_back({{"agent", to_string(e.agent)},
                       {"iteration", e.iteration},
                       {"label", e.label},
                       {"content", e.content}});
  }
  return {{"sample_id", t.sample_id},
          {"kind", to_string(t.kind)},
          {"caption", t.caption},
          {"initial_answer", t.initial_answer},
          {"initial_reasoned", t.initial_reasoned ? reasoned_json(*t.initial_reasoned) : json(nullptr)},
          {"initial_confidence",
           t.initial_confidence ? confidence_json(*t.initial_confidence) : json(nullptr)},
          {"initial_warnings", t.initial_warnings},
          {"icl_example_ids", t.icl_example_ids},
          {"iterations", std::move(iterations)},
          {"final_answer", t.final_answer},
          {"final_normalized", opt_string(t.final_normalized)},
          {"stop_reason", t.stop_reason ? json(to_string(*t.stop_reason)) : json(nullptr)},
          {"backend_call_log", std::move(calls)},
          {"history", std::move(history)},
          {"failed", t.failed},
          {"error", t.error}};
}

Trace parse_trace(const json& d) {
  try {
    Trace t;
    t.sample_id = d.at("sample_id").get<std::string>();
    t.kind = parse_question_kind(d.at("kind").get<std::string>());
    t.caption = d.at("caption").get<std::string>();
    t.initial_answer = d.at("initial_answer").get<std::string>();
    if (!d.at("initial_reasoned").is_null()) t.initial_reasoned = reasoned_from(d["initial_reasoned"]);
    if (!d.at("initial_confidence").is_null()) t.initial_confidence = confidence_from(d["initial_confidence"]);
    t.initial_warnings = d.at("initial_warnings").get<std::vector<std::string>>();
    t.icl_example_ids = d.at("icl_example_ids").get<std::vector<std::string>>();
    for (const auto& it : d.at("iterations")) {
      IterationRecord r;
      r.iteration = it.at("iteration").get<int>();
      for (const auto& s : it.at("sub_qas")) {
        r.sub_qas.push_back({agents::parse_sub_question_level(s.at("level").get<std::string>()),
                             s.at("question").get<std::string>(), s.at("answer").get<std::string>()});
      }
      r.rag_context = it.at("rag_context").get<std::string>();
      r.reasoned = reasoned_from(it.at("reasoned"));
      r.confidence = confidence_from(it.at("confidence"));
      r.warnings = it.at("warnings").get<std::vector<std::string>>();
      t.iterations.push_back(std::move(r));
    }
    t.final_answer = d.at("final_answer").get<std::string>();
    t.final_normalized = get_opt_string(d.at("final_normalized"));
    if (!d.at("stop_reason").is_null()) t.stop_reason = parse_stop_reason(d["stop_reason"].get<std::string>());
    for (const auto& c : d.at("backend_call_log")) {
      t.backend_call_log.push_back({parse_agent_role(c.at("role").get<std::string>()),
                                    parse_call_kind(c.at("kind").get<std::string>()),
                                    c.at("cache_hit").get<bool>()});
    }
    for (const auto& e : d.at("history")) {
      t.history.push_back({parse_agent_role(e.at("agent").get<std::string>()), e.at("iteration").get<int>(),
                           e.at("label").get<std::string>(), e.at("content").get<std::string>()});
    }
    t.failed = d.at("failed").get<bool>();
    t.error = d.at("error").get<std::string>();
    return t;
  } catch (const json::exception& e) {
    throw ParseError(std::string("trace document: ") + e.what());
  }
}

std::string trace_to_text(const Trace& trace) { return serialize_trace(trace).dump(2) + "\n"; }

}  // namespace vqa::orchestrator
