#include "spamlab/bulk.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <vector>

#include <fmt/format.h>

#include "spamlab/errors.hpp"

namespace spamlab::bulk {
namespace {

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

bool is_salutation(std::string_view line) {
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
  if (!line.starts_with("dear ") || !line.ends_with(',')) return false;
  const auto name = line.substr(5, line.size() - 6);
  return !name.empty() && std::none_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isspace(c) || c == ',';
  });
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (true) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

VolumeWindow::VolumeWindow(std::size_t window_size, std::uint64_t threshold, VolumeWeight weight)
    : window_size_(window_size), threshold_(threshold), weight_(weight) {}

std::uint64_t VolumeWindow::weight_of(const ConnectionLogEntry& e) const {
  return weight_ == VolumeWeight::Messages ? 1 : e.recipient_count;
}

std::uint64_t VolumeWindow::count_for(const std::string& host) const {
  auto it = per_host_.find(host);
  return it == per_host_.end() ? 0 : it->second;
}

void VolumeWindow::append(const ConnectionLogEntry& entry) {
  if (window_size_ == 0) return;
  if (entries_.size() == window_size_) {
    const auto& oldest = entries_.front();
    auto it = per_host_.find(oldest.origin_host);
    it->second -= weight_of(oldest);
    if (it->second == 0) per_host_.erase(it);
    entries_.pop_front();
  }
  per_host_[entry.origin_host] += weight_of(entry);
  entries_.push_back(entry);
}

Verdict volume_classify(VolumeWindow& window, const ConnectionLogEntry& entry) {
  const auto seen = window.count_for(entry.origin_host);
  Verdict v{seen > window.threshold() ? Label::Spam : Label::Ham, std::nullopt};
  window.append(entry);
  return v;
}

Verdict volume_classify(VolumeWindow& window, const Message& m) {
  return volume_classify(
      window, ConnectionLogEntry{m.step, m.origin_host, m.from_addr, std::max<std::size_t>(1, m.recipient_count())});
}

std::string fuzzy_normalize(std::string_view body) {
  std::string lower(body);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  auto lines = split_lines(lower);
  if (!lines.empty() && is_salutation(lines.front())) lines.erase(lines.begin());
  while (!lines.empty() && is_blank(lines.back())) lines.pop_back();
  for (std::size_t i = lines.size(); i-- > 0;) {
    if (is_blank(lines[i])) {
      lines.resize(i);
      break;
    }
  }

  std::string out;
  bool pending_space = false;
  for (auto line : lines) {
    for (unsigned char c : line) {
      if (std::isspace(c)) {
        pending_space = !out.empty();
      } else {
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(c);
      }
    }
    pending_space = !out.empty();
  }
  return out;
}

Digest body_checksum(std::string_view body, bool fuzzy) {
  return fuzzy ? fnv1a(fuzzy_normalize(body)) : fnv1a(body);
}

std::uint64_t ChecksumDB::count(Digest d) const {
  auto it = counts_.find(d);
  return it == counts_.end() ? 0 : it->second;
}

void ChecksumDB::save(std::ostream& out) const {
  std::vector<std::pair<Digest, std::uint64_t>> rows(counts_.begin(), counts_.end());
  std::sort(rows.begin(), rows.end());
  for (const auto& [d, n] : rows) out << fmt::format("{:016x}\t{}\n", d, n);
}

ChecksumDB ChecksumDB::load(std::istream& in, std::uint64_t bulk_threshold) {
  ChecksumDB db(bulk_threshold);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::IoFailure, "bad checksum row '" + line + "'");
    try {
      const Digest d = std::stoull(line.substr(0, tab), nullptr, 16);
      const auto n = std::stoull(line.substr(tab + 1));
      if (n == 0) throw Error(ErrorCode::IoFailure, "zero count in checksum row");
      db.counts_[d] = n;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::IoFailure, "bad checksum row '" + line + "'");
    }
  }
  return db;
}

Verdict checksum_classify(ChecksumDB& db, const Message& m, bool fuzzy) {
  const auto d = body_checksum(m.body, fuzzy);
  Verdict v{db.count(d) >= db.bulk_threshold() ? Label::Spam : Label::Ham, std::nullopt};
  db.report(d);
  return v;
}

}  // namespace spamlab::bulk
