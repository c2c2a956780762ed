#include "vqa/knowledge/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa::knowledge {

namespace {

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(std::string("cannot open ") + what + " '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool mutually_contained(const std::string& a, const std::string& b) {
  return a.find(b) != std::string::npos || b.find(a) != std::string::npos;
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::vector<Triple> triples) {
  for (auto& t : triples) {
    t.subject = text::collapse_whitespace(t.subject);
    t.relation = text::collapse_whitespace(t.relation);
    t.object = text::collapse_whitespace(t.object);
    if (t.subject.empty() || t.relation.empty() || t.object.empty()) {
      throw ParseError("triple with an empty field");
    }
  }
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  triples_ = std::move(triples);
  for (std::size_t i = 0; i < triples_.size(); ++i) {
    subject_index_[text::to_lower(triples_[i].subject)].push_back(i);
  }
}

std::vector<Triple> KnowledgeGraph::by_subject(std::string_view subject) const {
  std::vector<Triple> out;
  auto it = subject_index_.find(text::to_lower(text::collapse_whitespace(subject)));
  if (it == subject_index_.end()) return out;
  for (auto i : it->second) out.push_back(triples_[i]);
  return out;
}

KnowledgeGraph parse_kg(std::string_view source) {
  std::vector<Triple> triples;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(source)) {
    ++line_no;
    if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
    auto fields = text::split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError("knowledge graph: expected 3 tab-separated fields, found " +
                           std::to_string(fields.size()), line_no);
    }
    Triple t{text::collapse_whitespace(fields[0]), text::collapse_whitespace(fields[1]),
             text::collapse_whitespace(fields[2])};
    if (t.subject.empty() || t.relation.empty() || t.object.empty()) {
      throw ParseError("knowledge graph: empty field", line_no);
    }
    triples.push_back(std::move(t));
  }
  return KnowledgeGraph(std::move(triples));
}

KnowledgeGraph load_kg(const std::filesystem::path& path) {
  return parse_kg(read_file(path, "knowledge graph"));
}

std::vector<Triple> query_subgraph(const KnowledgeGraph& graph, std::string_view concept_text) {
  const auto needle = text::to_lower(text::collapse_whitespace(concept_text));
  std::vector<Triple> out;
  if (needle.empty()) return out;
  for (const auto& t : graph.triples()) {
    if (mutually_contained(text::to_lower(t.subject), needle) ||
        mutually_contained(text::to_lower(t.object), needle)) {
      out.push_back(t);
    }
  }
  return out;  // graph triples are already sorted and unique
}

RelationPhrases RelationPhrases::builtin() {
  static const RelationPhrases table = parse(builtin_relation_phrases_tsv());
  return table;
}

RelationPhrases RelationPhrases::parse(std::string_view source) {
  std::map<std::string, std::string> table;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(source)) {
    ++line_no;
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto fields = text::split(line, '\t');
    if (fields.size() != 2 || text::trim(fields[0]).empty() || text::trim(fields[1]).empty()) {
      throw ParseError("relation phrases: expected RELATION<TAB>phrase", line_no);
    }
    table[text::trim(fields[0])] = text::trim(fields[1]);
  }
  return RelationPhrases(std::move(table));
}

RelationPhrases RelationPhrases::load(const std::filesystem::path& path) {
  return parse(read_file(path, "relation phrase table"));
}

std::string RelationPhrases::phrase(const std::string& relation) const {
  auto it = table_.find(relation);
  return it != table_.end() ? it->second : text::to_lower(relation);
}

std::vector<VerbalizedFact> verbalize(std::span<const Triple> triples, const RelationPhrases& phrases) {
  std::map<std::pair<std::string, std::string>, std::set<std::string>> objects;
  std::map<std::pair<std::string, std::string>, std::set<Triple>> sources;
  for (const auto& t : triples) {
    objects[{t.subject, t.relation}].insert(t.object);
    sources[{t.subject, t.relation}].insert(t);
  }
  std::vector<VerbalizedFact> facts;
  facts.reserve(objects.size());
  for (const auto& [key, objs] : objects) {
    VerbalizedFact f;
    f.text = key.first + " " + phrases.phrase(key.second) + ": " +
             text::join(std::vector<std::string>(objs.begin(), objs.end()), ", ");
    const auto& src = sources[key];
    f.source_triples.assign(src.begin(), src.end());
    facts.push_back(std::move(f));
  }
  return facts;
}

}  // namespace vqa::knowledge
