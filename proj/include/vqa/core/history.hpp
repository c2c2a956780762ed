#pragma once

#include <span>
#include <string>
#include <vector>

#include "vqa/core/types.hpp"

namespace vqa {

struct ReasoningEntry {
  AgentRole agent = AgentRole::Perceiver;
  /// 0 for perception and the pre-loop pass; refinement passes count from 1.
  int iteration = 0;
  std::string label;
  std::string content;

  friend bool operator==(const ReasoningEntry&, const ReasoningEntry&) = default;
};

/// Append-only record of every agent output for one sample. This is the
/// shared context each agent reads when building its prompt.
class ReasoningHistory {
 public:
  void append(ReasoningEntry entry) { entries_.push_back(std::move(entry)); }

  std::span<const ReasoningEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// "[{agent} | iter {n} | {label}]\n{content}" per entry, blank line between.
  std::string render() const;

 private:
  std::vector<ReasoningEntry> entries_;
};

std::string render_entry(const ReasoningEntry& entry);

}  // namespace vqa
