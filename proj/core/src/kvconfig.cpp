#include "spamlab/kvconfig.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "spamlab/errors.hpp"

namespace spamlab {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, const std::string& value) {
  throw Error(ErrorCode::ConfigInvalid,
              "bad value for '" + std::string(key) + "': '" + value + "'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigInvalid,
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": empty key");
    }
    cfg.entries_.emplace_back(std::string(key), std::string(value));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingPath, "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto cfg = parse(buf.str());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  // Last assignment wins for scalar keys.
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == key) return it->second;
  }
  return std::nullopt;
}

std::vector<std::string> KeyValueConfig::get_all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out.push_back(v);
  }
  return out;
}

bool KeyValueConfig::contains(std::string_view key) const { return get(key).has_value(); }

std::string KeyValueConfig::get_string(std::string_view key, std::string fallback) const {
  auto v = get(key);
  return v ? *v : std::move(fallback);
}

long long KeyValueConfig::get_int(std::string_view key, long long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  long long out = 0;
  const auto* end = v->data() + v->size();
  auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, *v);
  return out;
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    double out = std::stod(*v, &used);
    if (used != v->size()) bad_value(key, *v);
    return out;
  } catch (const std::logic_error&) {
    bad_value(key, *v);
  }
}

bool KeyValueConfig::get_bool(std::string_view key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  bad_value(key, *v);
}

std::filesystem::path KeyValueConfig::resolve(const std::string& value) const {
  std::filesystem::path p(value);
  if (p.is_absolute() || base_dir_.empty()) return p;
  return base_dir_ / p;
}

}  // namespace spamlab
