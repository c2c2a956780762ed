#include "vqa/agents/prompts.hpp"

#include <fstream>
#include <sstream>

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa::agents {

namespace {

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

/// Length of `{identifier}` starting at `pos`, or 0.
std::size_t placeholder_at(const std::string& body, std::size_t pos) {
  if (body[pos] != '{' || pos + 2 >= body.size() || !ident_start(body[pos + 1])) return 0;
  std::size_t end = pos + 1;
  while (end < body.size() && ident_char(body[end])) ++end;
  if (end >= body.size() || body[end] != '}') return 0;
  return end - pos + 1;
}

std::string strip_final_newline(std::string s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::set<std::string> find_placeholders(const std::string& body) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (auto len = placeholder_at(body, i)) {
      names.insert(body.substr(i + 1, len - 2));
      i += len - 1;
    }
  }
  return names;
}

PromptTemplate::PromptTemplate(std::string name, std::string body)
    : name_(std::move(name)), body_(std::move(body)), placeholders_(find_placeholders(body_)) {}

std::string PromptTemplate::render(const Bindings& bindings) const {
  std::string out;
  out.reserve(body_.size() * 2);
  for (std::size_t i = 0; i < body_.size(); ++i) {
    if (auto len = placeholder_at(body_, i)) {
      const auto key = body_.substr(i + 1, len - 2);
      auto it = bindings.find(key);
      if (it == bindings.end()) {
        throw ConfigError("prompt '" + name_ + "': placeholder {" + key + "} is unbound");
      }
      out += it->second;
      i += len - 1;
      continue;
    }
    out.push_back(body_[i]);
  }
  return out;
}

const std::vector<std::string>& PromptLibrary::template_names() {
  static const std::vector<std::string> names = {
      "explorer_system",      "explorer_user",         "reasoner_open_system",
      "reasoner_open_user",   "reasoner_closed_system", "reasoner_closed_user",
      "evaluator_system",     "evaluator_user",         "retriever_extract"};
  return names;
}

PromptLibrary PromptLibrary::from_files(const std::map<std::string, std::string>& files) {
  PromptLibrary lib;
  for (const auto& name : template_names()) {
    auto it = files.find(name);
    if (it == files.end()) throw ConfigError("prompt template '" + name + "' is missing");
    lib.templates_[name] = PromptTemplate(name, strip_final_newline(it->second));
  }
  auto it = files.find("perceiver_captions");
  if (it == files.end()) throw ConfigError("prompt file 'perceiver_captions' is missing");
  for (const auto& line : text::split_lines(it->second)) {
    auto t = text::trim(line);
    if (!t.empty()) lib.captions_.push_back(std::move(t));
  }
  if (lib.captions_.empty()) throw ConfigError("prompt file 'perceiver_captions' is empty");
  return lib;
}

PromptLibrary PromptLibrary::builtin() {
  static const PromptLibrary lib = from_files(builtin_prompt_files());
  return lib;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("prompts directory '" + dir.string() + "' does not exist");
  }
  auto files = builtin_prompt_files();
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".txt") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    files[e.path().stem().string()] = buf.str();
  }
  return from_files(files);
}

const PromptTemplate& PromptLibrary::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw ConfigError("unknown prompt template '" + name + "'");
  return it->second;
}

}  // namespace vqa::agents
