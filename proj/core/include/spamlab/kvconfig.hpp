#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spamlab {

// Flat "key = value" file. Blank lines and lines starting with '#' are
// ignored. Keys may repeat; order is preserved.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;
  bool contains(std::string_view key) const;

  std::string get_string(std::string_view key, std::string fallback) const;
  long long get_int(std::string_view key, long long fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

  // Relative paths resolve against the directory of the loaded file.
  std::filesystem::path resolve(const std::string& value) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::filesystem::path base_dir_;
};

}  // namespace spamlab
