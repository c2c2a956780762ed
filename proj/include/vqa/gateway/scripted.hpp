#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "vqa/gateway/chat.hpp"

namespace vqa::gateway {

/// One scripted turn: which agent is expected to call, substrings its prompt
/// must contain, and the text to answer with.
struct TranscriptRecord {
  AgentRole role = AgentRole::Perceiver;
  std::vector<std::string> expects;
  std::string response;

  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

/// Transcript grammar:
///
///   transcript := comment* record*
///   comment    := line starting with '#' or blank, before the first record
///   record     := "=== " role NL ("?? " substring NL)* body
///   body       := every line up to the next "=== " header or end of file
///
/// Leading and trailing blank lines of a body are dropped. A body line that
/// must start with "===" or "??" is written with a leading backslash.
std::vector<TranscriptRecord> parse_transcript(std::string_view source);
std::vector<TranscriptRecord> load_transcript(const std::filesystem::path& path);
std::string format_transcript(const std::vector<TranscriptRecord>& records);

/// Serves transcript records strictly in order. Not safe to share between
/// concurrently running samples.
class ScriptedChatBackend final : public ChatBackend {
 public:
  explicit ScriptedChatBackend(std::vector<TranscriptRecord> records, std::string name = "scripted");

  Completion complete(AgentRole caller, const ChatRequest& request) override;
  std::string model_id() const override { return name_; }
  bool is_ordered() const override { return true; }

  std::size_t served() const;
  std::size_t remaining() const;

 private:
  std::vector<TranscriptRecord> records_;
  std::string name_;
  mutable std::mutex mutex_;
  std::size_t next_ = 0;
};

std::shared_ptr<ScriptedChatBackend> scripted_backend_from_transcript(
    const std::filesystem::path& path);

/// Fixture table: one `key<TAB>v1 v2 ...` line per entry (commas also accepted
/// between components). Image lookups use the image reference string as key.
/// Keys may escape a newline, tab or backslash as `\n`, `\t`, `\\`.
std::map<std::string, EmbeddingVector> parse_embedding_fixture(std::string_view source);

class ScriptedEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit ScriptedEmbeddingProvider(std::map<std::string, EmbeddingVector> table,
                                     std::string name = "scripted-embedder");
  static std::shared_ptr<ScriptedEmbeddingProvider> from_file(const std::filesystem::path& path);

  EmbeddingResult embed_text(const std::string& text) override;
  EmbeddingResult embed_image(const ImageRef& image) override;
  std::string model_id() const override { return name_; }

 private:
  EmbeddingResult lookup(const std::string& key) const;
  std::map<std::string, EmbeddingVector> table_;
  std::string name_;
};

}  // namespace vqa::gateway
