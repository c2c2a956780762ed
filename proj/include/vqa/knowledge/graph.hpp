#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vqa::knowledge {

struct Triple {
  std::string subject;
  std::string relation;
  std::string object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Local triple store. Immutable once built; safe for concurrent readers.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  /// Whitespace-normalizes every field and drops duplicates. Throws
  /// ParseError on an empty field.
  explicit KnowledgeGraph(std::vector<Triple> triples);

  /// Sorted by (subject, relation, object).
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }

  /// Triples whose subject equals `subject` after case folding.
  std::vector<Triple> by_subject(std::string_view subject) const;

 private:
  std::vector<Triple> triples_;
  std::map<std::string, std::vector<std::size_t>> subject_index_;
};

/// TSV triples, one `subject<TAB>relation<TAB>object` per line; '#' starts a
/// comment line. Errors name the offending line.
KnowledgeGraph parse_kg(std::string_view source);
KnowledgeGraph load_kg(const std::filesystem::path& path);

/// Direct edges for a concept: the case-folded concept and the case-folded
/// subject or object contain one another. Sorted, no duplicates.
std::vector<Triple> query_subgraph(const KnowledgeGraph& graph, std::string_view concept_text);

/// RELATION -> natural-language phrase, read from a `RELATION<TAB>phrase` file.
class RelationPhrases {
 public:
  RelationPhrases() = default;
  explicit RelationPhrases(std::map<std::string, std::string> table) : table_(std::move(table)) {}

  static RelationPhrases builtin();
  static RelationPhrases parse(std::string_view source);
  static RelationPhrases load(const std::filesystem::path& path);

  /// Table entry, or the relation token lowercased.
  std::string phrase(const std::string& relation) const;

 private:
  std::map<std::string, std::string> table_;
};

/// Generated from data/relation_phrases.tsv.
const std::string& builtin_relation_phrases_tsv();

struct VerbalizedFact {
  std::string text;
  std::vector<Triple> source_triples;
  double similarity = 0.0;

  friend bool operator==(const VerbalizedFact&, const VerbalizedFact&) = default;
};

/// One fact per (subject, relation) group:
/// "{subject} {phrase}: {object1}, {object2}, ..." with objects sorted.
std::vector<VerbalizedFact> verbalize(std::span<const Triple> triples, const RelationPhrases& phrases);

}  // namespace vqa::knowledge
