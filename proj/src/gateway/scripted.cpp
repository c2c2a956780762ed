#include "vqa/gateway/scripted.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa::gateway {

namespace {

std::string unescape_key(std::string_view raw, std::size_t line_no) {
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '\\') {
      out.push_back(raw[i]);
      continue;
    }
    if (++i == raw.size()) throw ParseError("embedding fixture: dangling backslash in key", line_no);
    switch (raw[i]) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case '\\': out.push_back('\\'); break;
      default: throw ParseError("embedding fixture: unknown escape in key", line_no);
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

void finish_body(TranscriptRecord& rec, std::vector<std::string>& body) {
  while (!body.empty() && text::trim(body.front()).empty()) body.erase(body.begin());
  while (!body.empty() && text::trim(body.back()).empty()) body.pop_back();
  rec.response = text::join(body, "\n");
  body.clear();
}

}  // namespace

std::vector<TranscriptRecord> parse_transcript(std::string_view source) {
  std::vector<TranscriptRecord> records;
  std::vector<std::string> body;
  bool in_header = false;
  std::size_t line_no = 0;
  for (auto& line : text::split_lines(source)) {
    ++line_no;
    if (starts_with(line, "=== ")) {
      if (!records.empty()) finish_body(records.back(), body);
      TranscriptRecord rec;
      try {
        rec.role = parse_agent_role(line.substr(4));
      } catch (const ParseError&) {
        throw ParseError("transcript: unknown agent role '" + text::trim(line.substr(4)) + "'",
                         line_no);
      }
      records.push_back(std::move(rec));
      in_header = true;
      continue;
    }
    if (records.empty()) {
      if (text::trim(line).empty() || starts_with(line, "#")) continue;
      throw ParseError("transcript: text before the first '=== <role>' header", line_no);
    }
    if (in_header && starts_with(line, "?? ")) {
      auto expect = line.substr(3);
      if (expect.empty()) throw ParseError("transcript: empty expectation", line_no);
      records.back().expects.push_back(std::move(expect));
      continue;
    }
    in_header = false;
    if (starts_with(line, "\\===") || starts_with(line, "\\??")) line.erase(0, 1);
    body.push_back(std::move(line));
  }
  if (!records.empty()) finish_body(records.back(), body);
  return records;
}

std::vector<TranscriptRecord> load_transcript(const std::filesystem::path& path) {
  return parse_transcript(read_file(path));
}

std::string format_transcript(const std::vector<TranscriptRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    out += "=== ";
    out += to_string(rec.role);
    out += "\n";
    for (const auto& e : rec.expects) out += "?? " + e + "\n";
    for (const auto& line : text::split_lines(rec.response)) {
      if (starts_with(line, "===") || starts_with(line, "??")) out += "\\";
      out += line + "\n";
    }
  }
  return out;
}

ScriptedChatBackend::ScriptedChatBackend(std::vector<TranscriptRecord> records, std::string name)
    : records_(std::move(records)), name_(std::move(name)) {}

Completion ScriptedChatBackend::complete(AgentRole caller, const ChatRequest& request) {
  request.validate();
  std::lock_guard lock(mutex_);
  if (next_ >= records_.size()) {
    throw ScriptError("script exhausted: no record left for " + std::string(to_string(caller)) +
                      " call #" + std::to_string(next_ + 1));
  }
  const auto& rec = records_[next_];
  if (rec.role != caller) {
    throw ScriptError("script record #" + std::to_string(next_ + 1) + " expects a " +
                      std::string(to_string(rec.role)) + " call, got " +
                      std::string(to_string(caller)));
  }
  const auto prompt = request.joined_text();
  for (const auto& expect : rec.expects) {
    if (prompt.find(expect) == std::string::npos) {
      throw ScriptError("script record #" + std::to_string(next_ + 1) +
                        ": prompt does not contain expected text '" + expect + "'");
    }
  }
  ++next_;
  return {rec.response, false};
}

std::size_t ScriptedChatBackend::served() const {
  std::lock_guard lock(mutex_);
  return next_;
}

std::size_t ScriptedChatBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return records_.size() - next_;
}

std::shared_ptr<ScriptedChatBackend> scripted_backend_from_transcript(
    const std::filesystem::path& path) {
  return std::make_shared<ScriptedChatBackend>(load_transcript(path), "scripted:" + path.filename().string());
}

std::map<std::string, EmbeddingVector> parse_embedding_fixture(std::string_view source) {
  std::map<std::string, EmbeddingVector> table;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(source)) {
    ++line_no;
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw ParseError("embedding fixture: expected key<TAB>vector", line_no);
    std::string key = unescape_key(std::string_view(line).substr(0, tab), line_no);
    std::string numbers = line.substr(tab + 1);
    for (auto& c : numbers) {
      if (c == ',') c = ' ';
    }
    EmbeddingVector v;
    std::istringstream in(numbers);
    std::string tok;
    while (in >> tok) {
      double d = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
      if (ec != std::errc() || p != tok.data() + tok.size()) {
        throw ParseError("embedding fixture: bad number '" + tok + "'", line_no);
      }
      v.values.push_back(d);
    }
    if (v.values.empty()) throw ParseError("embedding fixture: empty vector", line_no);
    if (dim == 0) dim = v.dim();
    if (v.dim() != dim) {
      throw ParseError("embedding fixture: dimension " + std::to_string(v.dim()) +
                           " differs from " + std::to_string(dim), line_no);
    }
    if (!table.emplace(std::move(key), std::move(v)).second) {
      throw ParseError("embedding fixture: duplicate key", line_no);
    }
  }
  return table;
}

ScriptedEmbeddingProvider::ScriptedEmbeddingProvider(std::map<std::string, EmbeddingVector> table,
                                                     std::string name)
    : table_(std::move(table)), name_(std::move(name)) {}

std::shared_ptr<ScriptedEmbeddingProvider> ScriptedEmbeddingProvider::from_file(
    const std::filesystem::path& path) {
  return std::make_shared<ScriptedEmbeddingProvider>(parse_embedding_fixture(read_file(path)),
                                                     "scripted:" + path.filename().string());
}

EmbeddingResult ScriptedEmbeddingProvider::lookup(const std::string& key) const {
  auto it = table_.find(key);
  if (it == table_.end()) throw ScriptError("unknown embedding fixture key '" + key + "'");
  return {it->second, false};
}

EmbeddingResult ScriptedEmbeddingProvider::embed_text(const std::string& text) {
  if (text.empty()) throw BackendError("cannot embed empty text");
  return lookup(text);
}

EmbeddingResult ScriptedEmbeddingProvider::embed_image(const ImageRef& image) {
  return lookup(image.str());
}

}  // namespace vqa::gateway
