#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spamlab/corpus.hpp"
#include "spamlab/kvconfig.hpp"
#include "spamlab/message.hpp"
#include "spamlab/rng.hpp"

namespace spamlab {

/// Knobs of the simulated population. The first block mirrors the
/// documented config keys one to one; the second block holds the per-kind
/// sender parameters.
struct SimConfig {
  std::size_t n_users = 500;
  std::size_t n_mailing_lists = 5;
  std::size_t n_spammers = 10;
  double sigma = 10.0;
  std::uint64_t seed = 1;
  std::uint64_t steps = 2000;
  double target_spam_fraction = 0.4;
  double recipients_mean = 1.3;

  double send_prob = 0.1;
  double list_send_prob = 0.05;
  std::size_t list_subscribers = 50;
  double activation_prob = 0.02;
  std::size_t burst_rate = 50;
  std::size_t spam_targets = 200;  // capped at n_users
  std::size_t bcc_batch = 50;
  bool personalize = false;
  bool bogus_headers = false;
  bool random_words = false;
  std::size_t random_word_count = 20;
  std::size_t users_per_host = 10;

  // Throws Error{ConfigInvalid}.
  void validate() const;

  static SimConfig from_config(const KeyValueConfig& kv);
  // Writes every key in the same syntax from_config reads.
  void write(std::ostream& out) const;
};

struct ConnectionLogEntry {
  std::uint64_t step = 0;
  std::string origin_host;
  std::string sender_addr;
  std::size_t recipient_count = 1;

  bool operator==(const ConnectionLogEntry&) const = default;
};

// Tab separated: step, origin_host, sender_addr, recipient_count.
std::string format_log_line(const ConnectionLogEntry& e);
std::optional<ConnectionLogEntry> parse_log_line(std::string_view line);

struct NormalUser {
  std::size_t topic = 0;
  double send_prob = 0.0;
};

struct MailingList {
  std::vector<std::string> subscribers;
  double send_prob = 0.0;
  std::size_t topic = 0;
  std::size_t cursor = 0;
  std::optional<std::string> current_body;
};

enum class SpammerState { Idle, Sending };

struct Spammer {
  std::vector<std::string> targets;
  SpammerState state = SpammerState::Idle;
  std::size_t cursor = 0;
  double activation_prob = 0.0;
  std::size_t burst_rate = 1;
  bool personalize = false;
  bool bogus_headers = false;
  bool random_words = false;
  std::string current_body;
};

struct SenderProfile {
  std::size_t index = 0;
  std::variant<NormalUser, MailingList, Spammer> kind;
  std::string address;
  std::string host;
};

struct Emission {
  Message message;
  ConnectionLogEntry log;
};

/// Draws a recipient offset; the default draws Normal(0, sigma^2).
using OffsetSource = std::function<double()>;

/// Picks k distinct recipients around `sender_index` on the user ring.
/// Offsets that round to 0 or to an already chosen index are redrawn.
std::vector<std::size_t> select_recipients(std::size_t sender_index, std::size_t n_users,
                                           std::size_t k, const OffsetSource& offsets);
std::vector<std::size_t> select_recipients(std::size_t sender_index, std::size_t n_users,
                                           double sigma, std::size_t k, Rng& rng);

std::size_t circular_distance(std::size_t a, std::size_t b, std::size_t n);

/// "Dear <login>,\n" + body. Throws Error{MalformedAddress}.
std::string personalize(std::string_view body, std::string_view recipient);

Message add_bogus_received(Message m, std::size_t count, Rng& rng);

/// Appends a blank line and `count` words drawn with replacement.
/// Throws Error{EmptyDictionary} when count > 0 and the dictionary is empty.
std::string add_random_words(std::string_view body, const std::vector<std::string>& dictionary,
                             std::size_t count, Rng& rng);

/// The whole simulated population plus its body sources. Owned by one
/// driver; `step` is the only mutator.
struct World {
  SimConfig config;
  std::vector<Corpus> ham_topics;
  Corpus spam;
  std::vector<std::string> dictionary;
  std::vector<SenderProfile> senders;
  std::vector<std::size_t> topic_cursor;
  std::size_t spam_cursor = 0;
  std::uint64_t current_step = 0;
  std::uint64_t next_message_seq = 0;

  std::size_t user_count() const { return config.n_users; }
  const std::string& user_address(std::size_t i) const { return senders[i].address; }
};

/// Builds the sender list: users [0, n_users), then mailing lists, then
/// spammers. Throws Error{CorpusMissing} when a needed corpus is absent.
World make_world(const SimConfig& config, std::vector<Corpus> ham_topics, Corpus spam,
                 std::vector<std::string> dictionary, Rng& rng);

/// Advances the world by one step and returns everything sent during it,
/// in sender-index order.
std::vector<Emission> step(World& world, Rng& rng);

/// Distinct tokens of all ham corpora, sorted.
std::vector<std::string> build_dictionary(const std::vector<Corpus>& ham_topics);

struct TrafficTally {
  std::uint64_t spam_deliveries = 0;
  std::uint64_t ham_deliveries = 0;
  std::uint64_t messages = 0;
  std::uint64_t steps = 0;

  double spam_fraction() const;
};

/// Runs a body-free pilot of `config` until at least `min_deliveries`
/// recipients were reached (or `max_steps` elapsed).
TrafficTally pilot_run(const SimConfig& config, std::uint64_t min_deliveries,
                       std::uint64_t max_steps = 2'000'000);

struct CalibrationOptions {
  std::uint64_t pilot_deliveries = 60'000;
  double tolerance = 0.02;
  int max_iterations = 40;
};

/// Rescales activation_prob so the long-run fraction of spam deliveries is
/// within `tolerance` of target_spam_fraction.
/// Throws Error{CalibrationFailed}.
SimConfig calibrate_spam_fraction(const SimConfig& config, const CalibrationOptions& opts = {});

}  // namespace spamlab
