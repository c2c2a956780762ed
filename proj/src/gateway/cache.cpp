#include "vqa/gateway/cache.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "vqa/core/error.hpp"

namespace vqa::gateway {

namespace fs = std::filesystem;

namespace {

bool is_key(const std::string& key) {
  if (key.size() < 3) return false;
  for (char c : key) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ResponseCache::ResponseCache(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw BackendError("cannot create cache directory '" + root_.string() + "': " + ec.message());
}

fs::path ResponseCache::path_for(const std::string& key_hex) const {
  if (!is_key(key_hex)) throw BackendError("malformed cache key '" + key_hex + "'");
  return root_ / key_hex.substr(0, 2) / (key_hex + ".json");
}

std::optional<CacheEntry> ResponseCache::lookup(const std::string& key_hex) const {
  const auto path = path_for(key_hex);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  auto doc = nlohmann::json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded() || !doc.contains("response")) {
    throw BackendError("corrupt cache entry '" + path.string() + "'");
  }
  return CacheEntry{doc["response"].get<std::string>(), doc.value("model_id", ""),
                    doc.value("timestamp", "")};
}

bool ResponseCache::store(const std::string& key_hex, const CacheEntry& entry) {
  const auto path = path_for(key_hex);
  std::lock_guard lock(store_mutex_);
  if (fs::exists(path)) return false;
  fs::create_directories(path.parent_path());

  nlohmann::json doc = {{"key", key_hex},
                        {"model_id", entry.model_id},
                        {"response", entry.response},
                        {"timestamp", entry.timestamp}};
  std::ostringstream tmp_name;
  tmp_name << path.filename().string() << ".tmp." << std::this_thread::get_id();
  const auto tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw BackendError("cannot write cache entry '" + tmp.string() + "'");
    out << doc.dump(2) << "\n";
    if (!out) throw BackendError("cannot write cache entry '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw BackendError("cannot commit cache entry '" + path.string() + "'");
  }
  writes_.fetch_add(1);
  return true;
}

ResponseCache::Stats ResponseCache::stats(const fs::path& root) {
  Stats s;
  if (!fs::exists(root)) return s;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ".json") {
      ++s.entries;
      s.bytes += e.file_size();
    }
  }
  return s;
}

std::size_t ResponseCache::clear(const fs::path& root) {
  std::size_t removed = 0;
  if (!fs::exists(root)) return 0;
  for (const auto& shard : fs::directory_iterator(root)) {
    if (!shard.is_directory() || shard.path().filename().string().size() != 2) continue;
    for (const auto& e : fs::directory_iterator(shard.path())) {
      if (e.is_regular_file() && e.path().extension() == ".json") {
        fs::remove(e.path());
        ++removed;
      }
    }
    std::error_code ec;
    fs::remove(shard.path(), ec);
  }
  return removed;
}

}  // namespace vqa::gateway
