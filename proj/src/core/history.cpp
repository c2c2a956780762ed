#include "vqa/core/history.hpp"

namespace vqa {

std::string render_entry(const ReasoningEntry& entry) {
  std::string out = "[";
  out += to_string(entry.agent);
  out += " | iter ";
  out += std::to_string(entry.iteration);
  out += " | ";
  out += entry.label;
  out += "]\n";
  out += entry.content;
  return out;
}

std::string ReasoningHistory::render() const {
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out += "\n\n";
    out += render_entry(entries_[i]);
  }
  return out;
}

}  // namespace vqa
