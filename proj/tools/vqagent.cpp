#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <iostream>
#include <optional>
#include <string>

#include "vqa/core/config.hpp"
#include "vqa/core/error.hpp"
#include "vqa/fewshot/fewshot.hpp"
#include "vqa/gateway/cache.hpp"
#include "vqa/gateway/factory.hpp"
#include "vqa/gateway/scripted.hpp"
#include "vqa/harness/benchmark.hpp"
#include "vqa/harness/dataset.hpp"
#include "vqa/harness/metrics.hpp"
#include "vqa/knowledge/graph.hpp"
#include "vqa/orchestrator/pipeline.hpp"

namespace fs = std::filesystem;
using namespace vqa;

namespace {

void log(std::string_view level, std::string_view event, const std::string& detail = {}) {
  std::cerr << "ts=" << gateway::utc_timestamp() << " level=" << level << " event=" << event;
  if (!detail.empty()) std::cerr << " msg=\"" << detail << "\"";
  std::cerr << "\n";
}

struct Overrides {
  std::optional<int> k_shot;
  std::optional<int> max_iterations;
  std::optional<int> confidence_threshold;
  std::optional<int> fixed_iterations;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> cache_dir;
  bool offline = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--k-shot", k_shot, "Few-shot examples per sample (0 disables)");
    cmd.add_option("--max-iterations", max_iterations, "Refinement iteration budget");
    cmd.add_option("--confidence-threshold", confidence_threshold, "Stop once confidence reaches this score (1-5)");
    cmd.add_option("--fixed-iterations", fixed_iterations, "Run exactly N refinement iterations");
    cmd.add_option("--workers", workers, "Samples processed in parallel");
    cmd.add_option("--seed", seed, "Run seed");
    cmd.add_option("--cache-dir", cache_dir, "Response cache directory for every backend");
    cmd.add_flag("--offline", offline, "Fail any model call not served by the cache");
  }

  void apply(RunConfig& c) const {
    if (k_shot) c.k_shot = *k_shot;
    if (max_iterations) c.max_iterations = *max_iterations;
    if (confidence_threshold) c.confidence_threshold = *confidence_threshold;
    if (fixed_iterations) c.fixed_iterations = *fixed_iterations;
    if (workers) c.workers = *workers;
    if (seed) c.rng_seed = *seed;
  }

  gateway::GatewayOptions gateway() const {
    gateway::GatewayOptions g;
    g.offline = offline;
    g.cache_dir = cache_dir;
    return g;
  }
};

RunConfig load_run_config(const std::string& path, const Overrides& o) {
  auto config = path.empty() ? RunConfig{} : load_config(path);
  o.apply(config);
  config.validate();
  return config;
}

int cmd_run(const std::string& config_path, const std::string& dataset_path, const std::string& out_dir,
            const Overrides& o) {
  const auto config = load_run_config(config_path, o);
  const auto dataset = harness::load_dataset(dataset_path);
  log("info", "dataset_loaded", dataset.name + ": " + std::to_string(dataset.samples.size()) + " samples");

  gateway::BackendFactory factory(o.gateway());
  auto backends = orchestrator::AgentBackends::from_config(config, factory);
  auto resources = std::make_shared<const orchestrator::Resources>(orchestrator::Resources::from_config(config));
  orchestrator::Pipeline pipeline(config, backends, resources);

  const auto calls_before = gateway::network_calls();
  const auto result = harness::run_benchmark(dataset, pipeline, {out_dir, config.workers}, resources->lexicon);
  if (result.workers != config.workers) {
    log("warn", "workers_forced", "ordered backends require workers = 1");
  }
  const auto& r = result.report;
  for (const auto& row : r.rows) {
    if (row.failed) log("error", "sample_failed", row.id + ": " + row.error);
  }
  log("info", "run_finished",
      std::to_string(r.n_samples) + " samples, " + std::to_string(r.n_failed) + " failed, " +
          std::to_string(gateway::network_calls() - calls_before) + " network calls");
  return r.n_failed == 0 ? 0 : 1;
}

int cmd_pool_build(const std::string& config_path, const std::string& dataset_path, const std::string& out,
                   const Overrides& o) {
  const auto config = load_run_config(config_path, o);
  const auto dataset = harness::load_dataset(dataset_path);
  gateway::BackendFactory factory(o.gateway());
  const auto perceiver_spec = config.backend_for(AgentRole::Perceiver);
  if (!perceiver_spec) throw ConfigError("no backend bound for [backend.perceiver]");
  if (!config.text_embedder) throw ConfigError("pool build needs [embedder.text]");
  if (!config.image_embedder) throw ConfigError("pool build needs [embedder.image]");
  auto perceiver = factory.chat(*perceiver_spec);
  auto text = factory.embedder(*config.text_embedder);
  auto image = factory.embedder(*config.image_embedder);
  const auto prompts =
      config.prompts_dir ? agents::PromptLibrary::load(*config.prompts_dir) : agents::PromptLibrary::builtin();

  auto built = fewshot::build_pool(dataset.samples, *perceiver, *text, *image, prompts, config.rng_seed);
  for (const auto& [id, reason] : built.skipped) log("warn", "sample_skipped", id + ": " + reason);
  fewshot::write_pool(out, built.pool);
  log("info", "pool_written", out + ": " + std::to_string(built.pool.size()) + " examples");
  return 0;
}

int cmd_kg_validate(const std::string& path) {
  const auto graph = knowledge::load_kg(path);
  std::cout << "triples: " << graph.size() << "\n";
  return 0;
}

int cmd_replay(const std::string& transcript, const std::string& sample_path, const std::string& config_path,
               const std::string& kg, const std::string& embeddings, const std::string& trace_out,
               const Overrides& o) {
  auto config = load_run_config(config_path, o);
  if (!kg.empty()) config.kg_path = kg;
  if (!embeddings.empty()) {
    BackendSpec spec;
    spec.script = embeddings;
    config.text_embedder = spec;
    config.image_embedder = spec;
  }
  if (!config.pool_path) config.k_shot = 0;

  std::ifstream in(sample_path, std::ios::binary);
  if (!in) throw DatasetError("cannot read sample '" + sample_path + "'");
  const auto sample = harness::parse_sample(std::string(std::istreambuf_iterator<char>(in), {}));

  gateway::BackendFactory factory(o.gateway());
  orchestrator::AgentBackends backends;
  auto script = gateway::scripted_backend_from_transcript(transcript);
  backends.perceiver = backends.explorer = backends.reasoner = backends.evaluator = backends.retriever = script;
  if (config.text_embedder) backends.text_embedder = factory.embedder(*config.text_embedder);
  if (config.image_embedder) backends.image_embedder = factory.embedder(*config.image_embedder);
  auto resources = std::make_shared<const orchestrator::Resources>(orchestrator::Resources::from_config(config));
  orchestrator::Pipeline pipeline(config, backends, resources);

  const auto trace = pipeline.run(sample);
  if (!trace_out.empty()) {
    std::ofstream out(trace_out, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + trace_out + "'");
    out << orchestrator::trace_to_text(trace);
  }
  if (trace.failed) {
    log("error", "replay_failed", trace.error);
    return 1;
  }
  if (script->remaining() > 0) {
    log("error", "replay_failed", std::to_string(script->remaining()) + " transcript records were not consumed");
    return 1;
  }
  std::cout << "Final Answer: " << trace.final_normalized.value_or(trace.final_answer) << "\n";
  if (sample.ground_truth) {
    std::cout << "Score: " << harness::score_sample(sample, trace.final_answer, resources->lexicon) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vqagent: multi-agent visual question answering with knowledge-augmented refinement"};
  app.require_subcommand(1);

  std::string config_path, dataset_path, out_dir, out_path, transcript, sample_path, kg, embeddings, target;
  Overrides overrides;

  auto* run = app.add_subcommand("run", "Run the pipeline over a dataset and write reports");
  run->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  run->add_option("--dataset", dataset_path, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "Directory for traces and reports")->required();
  overrides.add_to(*run);

  auto* pool = app.add_subcommand("pool", "Few-shot pool tools");
  pool->require_subcommand(1);
  auto* pool_build = pool->add_subcommand("build", "Caption and embed a dataset into a few-shot pool");
  pool_build->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  pool_build->add_option("--dataset", dataset_path, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
  pool_build->add_option("--out", out_path, "Pool file to write")->required();
  overrides.add_to(*pool_build);

  auto* kg_cmd = app.add_subcommand("kg", "Knowledge graph tools");
  kg_cmd->require_subcommand(1);
  auto* kg_validate = kg_cmd->add_subcommand("validate", "Parse a triple file and report its size");
  kg_validate->add_option("path", target, "Triple file (TSV)")->required();

  auto* replay = app.add_subcommand("replay", "Replay one sample from a recorded transcript");
  replay->add_option("--transcript", transcript, "Transcript file")->required()->check(CLI::ExistingFile);
  replay->add_option("--sample", sample_path, "Sample (JSON object)")->required()->check(CLI::ExistingFile);
  replay->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  replay->add_option("--kg", kg, "Triple file")->check(CLI::ExistingFile);
  replay->add_option("--embeddings", embeddings, "Embedding fixture for text and image")->check(CLI::ExistingFile);
  replay->add_option("--trace-out", out_path, "Write the trace JSON here");
  overrides.add_to(*replay);

  auto* cache = app.add_subcommand("cache", "Response cache tools");
  cache->require_subcommand(1);
  auto* cache_stats = cache->add_subcommand("stats", "Count cached entries");
  cache_stats->add_option("path", target, "Cache directory")->required();
  auto* cache_clear = cache->add_subcommand("clear", "Delete every cached entry");
  cache_clear->add_option("path", target, "Cache directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*run) return cmd_run(config_path, dataset_path, out_dir, overrides);
    if (*pool_build) return cmd_pool_build(config_path, dataset_path, out_path, overrides);
    if (*kg_validate) return cmd_kg_validate(target);
    if (*replay) return cmd_replay(transcript, sample_path, config_path, kg, embeddings, out_path, overrides);
    if (*cache_stats) {
      const auto s = gateway::ResponseCache::stats(target);
      std::cout << "entries: " << s.entries << "\nbytes: " << s.bytes << "\n";
      return 0;
    }
    if (*cache_clear) {
      std::cout << "removed: " << gateway::ResponseCache::clear(target) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    log("error", "failed", e.what());
    return 1;
  }
  return 2;
}
