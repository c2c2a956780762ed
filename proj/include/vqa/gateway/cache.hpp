#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

namespace vqa::gateway {

struct CacheEntry {
  std::string response;
  std::string model_id;
  std::string timestamp;
};

/// On-disk key/value store, one JSON file per key at
/// `<root>/<first two hex digits>/<digest>.json`. Writes go to a temporary
/// file that is renamed into place, so readers never see partial entries.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path root);

  std::optional<CacheEntry> lookup(const std::string& key_hex) const;

  /// Stores `entry` unless the key is already present. Returns true when a
  /// file was written.
  bool store(const std::string& key_hex, const CacheEntry& entry);

  std::filesystem::path path_for(const std::string& key_hex) const;
  const std::filesystem::path& root() const noexcept { return root_; }

  /// Files written by this instance.
  std::uint64_t writes() const noexcept { return writes_.load(); }

  struct Stats {
    std::size_t entries = 0;
    std::uintmax_t bytes = 0;
  };
  static Stats stats(const std::filesystem::path& root);
  /// Removes every entry; returns how many were deleted.
  static std::size_t clear(const std::filesystem::path& root);

 private:
  std::filesystem::path root_;
  std::mutex store_mutex_;
  std::atomic<std::uint64_t> writes_{0};
};

std::string utc_timestamp();

}  // namespace vqa::gateway
