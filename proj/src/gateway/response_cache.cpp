#include "suffbench/gateway/response_cache.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "suffbench/error.hpp"

namespace suffbench::gateway {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path ResponseCache::path_for(const std::string& key) const {
  if (key.size() < 3) throw StoreError("cache key too short");
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ResponseCache::put(const std::string& key, const std::string& payload) const {
  static std::atomic<unsigned long> counter{0};
  auto target = path_for(key);
  fs::create_directories(target.parent_path());
  auto tmp = target;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw StoreError("cannot write cache entry " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw StoreError("cannot place cache entry " + target.string());
  }
}

}  // namespace suffbench::gateway
