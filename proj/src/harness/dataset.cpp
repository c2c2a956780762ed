#include "vqa/harness/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa::harness {

namespace {

Sample sample_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw DatasetError("record is not a JSON object");
  Sample s;
  try {
    s.id = doc.at("id").is_string() ? doc["id"].get<std::string>() : doc["id"].dump();
    s.image = ImageRef(doc.at("image").get<std::string>());
    s.question = doc.at("question").get<std::string>();
    s.kind = parse_question_kind(doc.at("kind").get<std::string>());
    if (doc.contains("ground_truth") && !doc["ground_truth"].is_null()) {
      s.ground_truth = doc["ground_truth"].get<std::string>();
    }
    if (doc.contains("options") && !doc["options"].is_null()) {
      s.options = doc["options"].get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(e.what());
  } catch (const ParseError& e) {
    throw DatasetError(e.what());
  }
  s.validate();
  return s;
}

}  // namespace

Dataset parse_dataset(std::string_view source, std::string name) {
  Dataset ds;
  ds.name = std::move(name);
  std::set<std::string> ids;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(source)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded()) throw DatasetError("record " + std::to_string(line_no) + ": invalid JSON");
    Sample s;
    try {
      s = sample_from_json(doc);
    } catch (const DatasetError& e) {
      throw DatasetError("record " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(s.id).second) {
      throw DatasetError("record " + std::to_string(line_no) + ": duplicate sample id '" + s.id + "'");
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), path.stem().string());
}

Sample parse_sample(const std::string& json_text) {
  auto doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw DatasetError("sample file is not valid JSON");
  return sample_from_json(doc);
}

}  // namespace vqa::harness
