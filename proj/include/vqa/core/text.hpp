#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vqa::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Collapses runs of whitespace to a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string> split_lines(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Scoring tokenizer: lowercase, split on whitespace, strip punctuation from
/// both ends of every token, drop tokens that end up empty.
std::vector<std::string> tokenize(std::string_view s);

bool contains_case_insensitive(std::string_view haystack, std::string_view needle);

std::string base64_encode(std::string_view bytes);

}  // namespace vqa::text

namespace vqa {

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace vqa

namespace vqa {

/// Per-sample seed so results do not depend on execution order.
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view sample_id) {
  return splitmix64(run_seed ^ fnv1a64(sample_id));
}

}  // namespace vqa
