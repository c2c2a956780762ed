#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vqa/core/types.hpp"

namespace vqa::harness {

struct Dataset {
  std::string name;
  std::vector<Sample> samples;
  std::optional<std::string> icl_pool_path;
};

/// JSON Lines, one sample per line:
///   {"id": ..., "image": ..., "question": ..., "kind": "closed|open|multi_choice",
///    "ground_truth": ..., "options": [...]}
/// Errors name the 1-based record line. Duplicate ids are rejected.
Dataset parse_dataset(std::string_view source, std::string name);
Dataset load_dataset(const std::filesystem::path& path);

/// A single sample as a JSON object (the `replay --sample` file format).
Sample parse_sample(const std::string& json_text);

}  // namespace vqa::harness
