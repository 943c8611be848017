#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace suffbench::gateway {

/// Content-addressed response store: `<dir>/<key[0:2]>/<key>.json`.
/// Writes go to a unique temp file and are renamed into place, so concurrent
/// writers of the same key are idempotent and readers never see partial files.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& payload) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path dir_;
};

}  // namespace suffbench::gateway
