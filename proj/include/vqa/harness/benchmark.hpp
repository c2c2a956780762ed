#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqa/harness/dataset.hpp"
#include "vqa/orchestrator/pipeline.hpp"

namespace vqa::harness {

struct SampleRow {
  std::string id;
  QuestionKind kind = QuestionKind::Closed;
  double score = 0.0;
  int iterations = 0;
  std::string stop_reason;  // empty for failed samples
  bool failed = false;
  std::string error;

  friend bool operator==(const SampleRow&, const SampleRow&) = default;
};

struct MetricReport {
  std::string dataset;
  std::size_t n_samples = 0;
  std::size_t n_failed = 0;
  /// Mean over successful closed and multi-choice samples; nullopt when none.
  std::optional<double> closed_accuracy;
  /// Mean over successful open samples; nullopt when none.
  std::optional<double> open_recall;
  std::map<std::string, std::size_t> per_kind;
  double mean_iterations = 0.0;
  std::map<std::string, std::size_t> stop_reasons;
  std::vector<SampleRow> rows;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// Aggregates rows in order. Failed rows count toward n_failed only.
MetricReport aggregate(const std::string& dataset, std::vector<SampleRow> rows);

/// Throws Error if the aggregates differ from a recomputation over rows.
void validate_report(const MetricReport& report);

nlohmann::json report_to_json(const MetricReport& report);
MetricReport report_from_json(const nlohmann::json& doc);
/// Plain-text table with Open / Closed columns followed by per-sample rows.
std::string report_to_markdown(const MetricReport& report);

SampleRow score_trace(const Sample& sample, const orchestrator::Trace& trace,
                      const YesNoLexicon& lexicon);

struct BenchmarkOptions {
  std::filesystem::path out_dir;
  int workers = 1;
};

struct BenchmarkResult {
  MetricReport report;
  /// Worker count actually used; ordered (scripted) backends force 1.
  int workers = 1;
};

/// Runs every sample, writes `<out_dir>/traces/<id>.json`, `report.json` and
/// `report.md`. Throws DatasetError for an empty dataset or a ground truth the
/// scorer cannot normalize; per-sample failures are recorded, not thrown.
BenchmarkResult run_benchmark(const Dataset& dataset, const orchestrator::Pipeline& pipeline,
                              const BenchmarkOptions& options, const YesNoLexicon& lexicon = {});

/// File name used for a sample's trace (unsafe characters become '_').
std::string trace_file_name(const std::string& sample_id);

}  // namespace vqa::harness
