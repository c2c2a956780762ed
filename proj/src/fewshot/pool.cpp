#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vqa/agents/agents.hpp"
#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"
#include "vqa/fewshot/fewshot.hpp"

namespace vqa::fewshot {

namespace {

constexpr const char* kFormat = "vqa-icl-pool";
constexpr int kVersion = 1;

}  // namespace

PoolBuildResult build_pool(std::span<const Sample> samples, gateway::ChatBackend& perceiver,
                           gateway::EmbeddingProvider& text_embedder,
                           gateway::EmbeddingProvider& image_embedder,
                           const agents::PromptLibrary& prompts, std::uint64_t rng_seed) {
  PoolBuildResult out;
  for (const auto& s : samples) {
    if (!s.ground_truth) {
      out.skipped.emplace_back(s.id, "no ground truth");
      continue;
    }
    try {
      CandidateExample ex;
      ex.id = s.id;
      ex.question = question_with_options(s);
      ex.answer = *s.ground_truth;
      ex.caption = agents::describe_image(perceiver, prompts, s.image, derive_seed(rng_seed, s.id));
      ex.text_embedding = text_embedder.embed_text(ex.question).vector;
      ex.image_embedding = image_embedder.embed_image(s.image).vector;
      if (!out.pool.empty() &&
          (ex.text_embedding.dim() != out.pool.front().text_embedding.dim() ||
           ex.image_embedding.dim() != out.pool.front().image_embedding.dim())) {
        throw BackendError("embedding dimension changed within the pool");
      }
      out.pool.push_back(std::move(ex));
    } catch (const BackendError& e) {
      out.skipped.emplace_back(s.id, e.what());
    }
  }
  return out;
}

std::string serialize_pool(std::span<const CandidateExample> pool) {
  std::string out;
  nlohmann::json header = {{"format", kFormat}, {"version", kVersion}, {"count", pool.size()}};
  if (!pool.empty()) {
    header["text_dim"] = pool.front().text_embedding.dim();
    header["image_dim"] = pool.front().image_embedding.dim();
  }
  out += header.dump() + "\n";
  for (const auto& ex : pool) {
    nlohmann::json rec = {{"id", ex.id},
                          {"caption", ex.caption},
                          {"question", ex.question},
                          {"answer", ex.answer},
                          {"text_embedding", ex.text_embedding.values},
                          {"image_embedding", ex.image_embedding.values}};
    out += rec.dump() + "\n";
  }
  return out;
}

std::vector<CandidateExample> parse_pool(std::string_view source) {
  const auto lines = text::split_lines(source);
  std::vector<CandidateExample> pool;
  bool have_header = false;
  std::size_t expected = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    auto doc = nlohmann::json::parse(lines[i], nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ParseError("pool: invalid JSON record", i + 1);
    try {
      if (!have_header) {
        if (doc.value("format", "") != kFormat) throw ParseError("pool: missing header", i + 1);
        if (doc.value("version", 0) != kVersion) {
          throw ParseError("pool: unsupported version " + std::to_string(doc.value("version", 0)), i + 1);
        }
        expected = doc.at("count").get<std::size_t>();
        have_header = true;
        continue;
      }
      CandidateExample ex;
      ex.id = doc.at("id").get<std::string>();
      ex.caption = doc.at("caption").get<std::string>();
      ex.question = doc.at("question").get<std::string>();
      ex.answer = doc.at("answer").get<std::string>();
      ex.text_embedding.values = doc.at("text_embedding").get<std::vector<double>>();
      ex.image_embedding.values = doc.at("image_embedding").get<std::vector<double>>();
      if (!pool.empty() && (ex.text_embedding.dim() != pool.front().text_embedding.dim() ||
                            ex.image_embedding.dim() != pool.front().image_embedding.dim())) {
        throw ParseError("pool: embedding dimension differs from first record", i + 1);
      }
      pool.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("pool: ") + e.what(), i + 1);
    }
  }
  if (!have_header) throw ParseError("pool: empty file");
  if (pool.size() != expected) {
    throw ParseError("pool: header announces " + std::to_string(expected) + " records, found " +
                     std::to_string(pool.size()));
  }
  return pool;
}

void write_pool(const std::filesystem::path& path, std::span<const CandidateExample> pool) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write pool file '" + path.string() + "'");
  out << serialize_pool(pool);
}

std::vector<CandidateExample> read_pool(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open pool file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_pool(buf.str());
}

}  // namespace vqa::fewshot
