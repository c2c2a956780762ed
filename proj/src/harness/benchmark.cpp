#include "vqa/harness/benchmark.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vqa/core/error.hpp"
#include "vqa/harness/metrics.hpp"

namespace vqa::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& body) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << body;
  }
  fs::rename(tmp, path);
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

MetricReport aggregate(const std::string& dataset, std::vector<SampleRow> rows) {
  MetricReport r;
  r.dataset = dataset;
  r.n_samples = rows.size();
  double closed_sum = 0, open_sum = 0, iter_sum = 0;
  std::size_t closed_n = 0, open_n = 0, ok_n = 0;
  for (const auto& row : rows) {
    ++r.per_kind[std::string(to_string(row.kind))];
    if (row.failed) {
      ++r.n_failed;
      continue;
    }
    ++ok_n;
    iter_sum += row.iterations;
    ++r.stop_reasons[row.stop_reason];
    if (row.kind == QuestionKind::Open) {
      open_sum += row.score;
      ++open_n;
    } else {
      closed_sum += row.score;
      ++closed_n;
    }
  }
  if (closed_n) r.closed_accuracy = closed_sum / static_cast<double>(closed_n);
  if (open_n) r.open_recall = open_sum / static_cast<double>(open_n);
  r.mean_iterations = ok_n ? iter_sum / static_cast<double>(ok_n) : 0.0;
  r.rows = std::move(rows);
  return r;
}

void validate_report(const MetricReport& report) {
  if (!(aggregate(report.dataset, report.rows) == report)) {
    throw Error("report aggregates do not match their per-sample rows");
  }
}

json report_to_json(const MetricReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"id", row.id},
                    {"kind", to_string(row.kind)},
                    {"score", row.score},
                    {"iterations", row.iterations},
                    {"stop_reason", row.stop_reason},
                    {"failed", row.failed},
                    {"error", row.error}});
  }
  return {{"dataset", r.dataset},
          {"n_samples", r.n_samples},
          {"n_failed", r.n_failed},
          {"closed_accuracy", opt_number(r.closed_accuracy)},
          {"open_recall", opt_number(r.open_recall)},
          {"per_kind", r.per_kind},
          {"mean_iterations", r.mean_iterations},
          {"stop_reasons", r.stop_reasons},
          {"rows", std::move(rows)}};
}

MetricReport report_from_json(const json& d) {
  try {
    MetricReport r;
    r.dataset = d.at("dataset").get<std::string>();
    r.n_samples = d.at("n_samples").get<std::size_t>();
    r.n_failed = d.at("n_failed").get<std::size_t>();
    if (!d.at("closed_accuracy").is_null()) r.closed_accuracy = d["closed_accuracy"].get<double>();
    if (!d.at("open_recall").is_null()) r.open_recall = d["open_recall"].get<double>();
    r.per_kind = d.at("per_kind").get<std::map<std::string, std::size_t>>();
    r.mean_iterations = d.at("mean_iterations").get<double>();
    r.stop_reasons = d.at("stop_reasons").get<std::map<std::string, std::size_t>>();
    for (const auto& row : d.at("rows")) {
      r.rows.push_back({row.at("id").get<std::string>(),
                        parse_question_kind(row.at("kind").get<std::string>()),
                        row.at("score").get<double>(), row.at("iterations").get<int>(),
                        row.at("stop_reason").get<std::string>(), row.at("failed").get<bool>(),
                        row.at("error").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report document: ") + e.what());
  }
}

std::string report_to_markdown(const MetricReport& r) {
  std::ostringstream out;
  out << "# Benchmark report: " << r.dataset << "\n\n";
  out << "| Dataset | Open | Closed | Samples | Failed | Mean iterations |\n";
  out << "|---|---:|---:|---:|---:|---:|\n";
  out << "| " << r.dataset << " | " << percent(r.open_recall) << " | " << percent(r.closed_accuracy)
      << " | " << r.n_samples << " | " << r.n_failed << " | " << fixed(r.mean_iterations, 3) << " |\n\n";
  out << "Open = token recall (%), Closed = strict accuracy (%).\n\n";
  out << "## Stop reasons\n\n| Reason | Samples |\n|---|---:|\n";
  for (const auto& [reason, n] : r.stop_reasons) out << "| " << reason << " | " << n << " |\n";
  out << "\n## Samples\n\n| Id | Kind | Score | Iterations | Stop reason |\n|---|---|---:|---:|---|\n";
  for (const auto& row : r.rows) {
    out << "| " << row.id << " | " << to_string(row.kind) << " | "
        << (row.failed ? std::string("failed") : fixed(row.score, 4)) << " | " << row.iterations
        << " | " << (row.failed ? row.error : row.stop_reason) << " |\n";
  }
  return out.str();
}

SampleRow score_trace(const Sample& sample, const orchestrator::Trace& trace,
                      const YesNoLexicon& lexicon) {
  SampleRow row;
  row.id = sample.id;
  row.kind = sample.kind;
  row.iterations = static_cast<int>(trace.iterations.size());
  if (trace.failed) {
    row.failed = true;
    row.error = trace.error;
    return row;
  }
  row.score = score_sample(sample, trace.final_answer, lexicon);
  row.stop_reason = trace.stop_reason ? std::string(orchestrator::to_string(*trace.stop_reason)) : "";
  return row;
}

std::string trace_file_name(const std::string& sample_id) {
  std::string name;
  for (char c : sample_id) {
    const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    name.push_back(safe ? c : '_');
  }
  if (name.empty() || name == "." || name == "..") name = "_" + name;
  return name + ".json";
}

BenchmarkResult run_benchmark(const Dataset& dataset, const orchestrator::Pipeline& pipeline,
                              const BenchmarkOptions& options, const YesNoLexicon& lexicon) {
  if (dataset.samples.empty()) throw DatasetError("empty dataset");
  for (const auto& s : dataset.samples) {
    if (!s.ground_truth) throw DatasetError("sample '" + s.id + "' has no ground truth");
    if (s.kind != QuestionKind::Open) normalize_ground_truth(*s.ground_truth, s.options, lexicon);
  }
  if (options.workers < 1) throw ConfigError("workers must be >= 1");

  const auto traces_dir = options.out_dir / "traces";
  fs::create_directories(traces_dir);

  BenchmarkResult result;
  result.workers = pipeline.backends().any_ordered() ? 1 : options.workers;

  const auto n = static_cast<std::ptrdiff_t>(dataset.samples.size());
  std::vector<SampleRow> rows(dataset.samples.size());
  std::vector<std::string> io_errors(dataset.samples.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(result.workers)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& sample = dataset.samples[static_cast<std::size_t>(i)];
    try {
      const auto trace = pipeline.run(sample);
      write_text(traces_dir / trace_file_name(sample.id), orchestrator::trace_to_text(trace));
      rows[static_cast<std::size_t>(i)] = score_trace(sample, trace, lexicon);
    } catch (const std::exception& e) {
      io_errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : io_errors) {
    if (!e.empty()) throw Error(e);
  }

  result.report = aggregate(dataset.name, std::move(rows));
  validate_report(result.report);
  write_text(options.out_dir / "report.json", report_to_json(result.report).dump(2) + "\n");
  write_text(options.out_dir / "report.md", report_to_markdown(result.report));
  return result;
}

}  // namespace vqa::harness
