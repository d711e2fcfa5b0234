#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>

#include "spamlab/message.hpp"
#include "spamlab/trafficgen.hpp"
#include "spamlab/verdict.hpp"

namespace spamlab::bulk {

enum class VolumeWeight {
  Messages,    // each log entry counts once
  Recipients,  // each log entry counts recipient_count
};

/// Trailing window over the connection log. Keeps a per-host running total
/// so a lookup does not rescan the window.
class VolumeWindow {
 public:
  explicit VolumeWindow(std::size_t window_size = 1500, std::uint64_t threshold = 100,
                        VolumeWeight weight = VolumeWeight::Messages);

  std::uint64_t count_for(const std::string& host) const;
  void append(const ConnectionLogEntry& entry);

  std::size_t size() const { return entries_.size(); }
  std::size_t window_size() const { return window_size_; }
  std::uint64_t threshold() const { return threshold_; }
  const std::deque<ConnectionLogEntry>& entries() const { return entries_; }

 private:
  std::uint64_t weight_of(const ConnectionLogEntry& e) const;

  std::size_t window_size_;
  std::uint64_t threshold_;
  VolumeWeight weight_;
  std::deque<ConnectionLogEntry> entries_;
  std::unordered_map<std::string, std::uint64_t> per_host_;
};

/// SPAM iff the window already holds more than `threshold` units from the
/// message's origin host; then records the message's own entry.
Verdict volume_classify(VolumeWindow& window, const ConnectionLogEntry& entry);
Verdict volume_classify(VolumeWindow& window, const Message& m);

using Digest = std::uint64_t;

/// 64-bit FNV-1a of the body. In fuzzy mode the body is first lowercased,
/// stripped of a leading "dear <token>," line and of the paragraph after
/// the last blank line, and whitespace runs are collapsed.
Digest body_checksum(std::string_view body, bool fuzzy);

std::string fuzzy_normalize(std::string_view body);

class ChecksumDB {
 public:
  explicit ChecksumDB(std::uint64_t bulk_threshold = 5) : bulk_threshold_(bulk_threshold) {}

  std::uint64_t count(Digest d) const;
  void report(Digest d) { ++counts_[d]; }

  std::uint64_t bulk_threshold() const { return bulk_threshold_; }
  std::size_t size() const { return counts_.size(); }

  // "digest<TAB>count" lines, digest as 16 hex digits, sorted by digest.
  void save(std::ostream& out) const;
  static ChecksumDB load(std::istream& in, std::uint64_t bulk_threshold);

 private:
  std::uint64_t bulk_threshold_;
  std::unordered_map<Digest, std::uint64_t> counts_;
};

/// SPAM iff the digest was already seen at least bulk_threshold times; the
/// message is reported afterwards.
Verdict checksum_classify(ChecksumDB& db, const Message& m, bool fuzzy);

}  // namespace spamlab::bulk
