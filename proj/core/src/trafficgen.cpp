#include "spamlab/trafficgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

#include "spamlab/errors.hpp"

namespace spamlab {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorCode::ConfigInvalid, what);
}

// First non-empty line of the body, at most 60 bytes, cut on a UTF-8
// character boundary.
std::string derive_subject(std::string_view body) {
  while (!body.empty()) {
    const auto nl = body.find('\n');
    std::string_view line = body.substr(0, nl);
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos) {
      line = line.substr(first);
      const auto last = line.find_last_not_of(" \t\r");
      line = line.substr(0, last + 1);
      if (line.size() > 60) {
        std::size_t cut = 60;
        while (cut > 0 && (static_cast<unsigned char>(line[cut]) & 0xC0) == 0x80) --cut;
        line = line.substr(0, cut);
      }
      return std::string(line);
    }
    if (nl == std::string_view::npos) break;
    body.remove_prefix(nl + 1);
  }
  return {};
}

std::string message_id(World& w, std::string_view host) {
  return fmt::format("<{}.{}@{}>", w.next_message_seq++, w.current_step, host);
}

std::string real_received(std::string_view host, std::uint64_t seq, std::uint64_t step) {
  return fmt::format("from {} by mx.sim.example with SMTP id {:08x}; step {}", host, seq, step);
}

Emission make_emission(World& w, const SenderProfile& sender, Message m) {
  m.from_addr = sender.address;
  m.origin_host = sender.host;
  m.step = w.current_step;
  const auto seq = w.next_message_seq;
  m.message_id = message_id(w, sender.host);
  m.received_headers.push_back(real_received(sender.host, seq, w.current_step));
  ConnectionLogEntry log{w.current_step, sender.host, sender.address, m.recipient_count()};
  return {std::move(m), std::move(log)};
}

const std::string& next_topic_body(World& w, std::size_t topic) {
  const auto& bodies = w.ham_topics[topic].bodies;
  return bodies[w.topic_cursor[topic]++ % bodies.size()];
}

std::size_t draw_recipient_count(const SimConfig& cfg, Rng& rng) {
  std::geometric_distribution<std::size_t> extra(1.0 / cfg.recipients_mean);
  const std::size_t k = 1 + extra(rng);
  return std::clamp<std::size_t>(k, 1, cfg.n_users - 1);
}

void send_normal(World& w, const SenderProfile& sender, const NormalUser& user, Rng& rng,
                 std::vector<Emission>& out) {
  std::bernoulli_distribution fires(user.send_prob);
  if (!fires(rng)) return;
  const auto& cfg = w.config;
  const auto k = draw_recipient_count(cfg, rng);
  const auto recipients = select_recipients(sender.index, cfg.n_users, cfg.sigma, k, rng);
  Message m;
  std::uniform_int_distribution<int> slot(0, 2);
  for (auto r : recipients) {
    switch (slot(rng)) {
      case 0: m.to_addrs.push_back(w.user_address(r)); break;
      case 1: m.cc_addrs.push_back(w.user_address(r)); break;
      default: m.bcc_addrs.push_back(w.user_address(r)); break;
    }
  }
  m.body = next_topic_body(w, user.topic);
  m.subject = derive_subject(m.body);
  m.truth = Label::Ham;
  out.push_back(make_emission(w, sender, std::move(m)));
}

void send_list(World& w, const SenderProfile& sender, MailingList& list, Rng& rng,
               std::vector<Emission>& out) {
  if (!list.current_body) {
    std::bernoulli_distribution fires(list.send_prob);
    if (!fires(rng) || list.subscribers.empty()) return;
    list.current_body = next_topic_body(w, list.topic);
    list.cursor = 0;
  }
  Message m;
  m.to_addrs.push_back(list.subscribers[list.cursor]);
  m.body = *list.current_body;
  m.subject = derive_subject(m.body);
  m.truth = Label::Ham;
  out.push_back(make_emission(w, sender, std::move(m)));
  if (++list.cursor == list.subscribers.size()) {
    list.cursor = 0;
    list.current_body.reset();
  }
}

Message spam_message(World& w, const Spammer& spammer, std::string body, Rng& rng) {
  Message m;
  if (spammer.random_words) {
    body = add_random_words(body, w.dictionary, w.config.random_word_count, rng);
  }
  m.subject = derive_subject(spammer.current_body);
  m.body = std::move(body);
  m.truth = Label::Spam;
  return m;
}

void send_spam(World& w, const SenderProfile& sender, Spammer& spammer, Rng& rng,
               std::vector<Emission>& out) {
  if (spammer.state == SpammerState::Idle) {
    std::bernoulli_distribution activates(spammer.activation_prob);
    if (!activates(rng) || spammer.targets.empty()) return;
    const auto& bodies = w.spam.bodies;
    spammer.current_body = bodies[w.spam_cursor++ % bodies.size()];
    spammer.state = SpammerState::Sending;
    spammer.cursor = 0;
  }

  const auto n = std::min(spammer.burst_rate, spammer.targets.size() - spammer.cursor);
  const auto first = spammer.targets.begin() + static_cast<std::ptrdiff_t>(spammer.cursor);
  const std::vector<std::string> batch(first, first + static_cast<std::ptrdiff_t>(n));
  spammer.cursor += n;

  auto finish = [&](Message m) {
    if (spammer.bogus_headers) {
      std::uniform_int_distribution<std::size_t> how_many(1, 3);
      m = add_bogus_received(std::move(m), how_many(rng), rng);
    }
    // Bogus entries precede the real one added by make_emission.
    auto e = make_emission(w, sender, std::move(m));
    out.push_back(std::move(e));
  };

  if (spammer.personalize) {
    for (const auto& target : batch) {
      Message m = spam_message(w, spammer, personalize(spammer.current_body, target), rng);
      m.to_addrs.push_back(target);
      finish(std::move(m));
    }
  } else {
    const auto chunk = std::max<std::size_t>(1, w.config.bcc_batch);
    for (std::size_t i = 0; i < batch.size(); i += chunk) {
      Message m = spam_message(w, spammer, spammer.current_body, rng);
      const auto end = std::min(batch.size(), i + chunk);
      m.bcc_addrs.assign(batch.begin() + static_cast<std::ptrdiff_t>(i),
                         batch.begin() + static_cast<std::ptrdiff_t>(end));
      finish(std::move(m));
    }
  }

  if (spammer.cursor == spammer.targets.size()) {
    spammer.state = SpammerState::Idle;
    spammer.cursor = 0;
  }
}

std::string random_host(Rng& rng) {
  static constexpr std::string_view kWords[] = {"relay", "mail", "smtp", "mx", "gw", "post"};
  static constexpr std::string_view kTlds[] = {"com", "net", "org", "biz", "info"};
  std::uniform_int_distribution<std::size_t> word(0, std::size(kWords) - 1);
  std::uniform_int_distribution<std::size_t> tld(0, std::size(kTlds) - 1);
  std::uniform_int_distribution<int> num(1, 999);
  return fmt::format("{}{}.{}", kWords[word(rng)], num(rng), kTlds[tld(rng)]);
}

}  // namespace

void SimConfig::validate() const {
  require(n_users >= 2, "n_users must be at least 2");
  require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
  require(is_probability(target_spam_fraction), "target_spam_fraction must lie in [0,1]");
  require(recipients_mean >= 1.0, "recipients_mean must be at least 1");
  require(is_probability(send_prob), "send_prob must lie in [0,1]");
  require(is_probability(list_send_prob), "list_send_prob must lie in [0,1]");
  require(is_probability(activation_prob), "activation_prob must lie in [0,1]");
  require(burst_rate >= 1, "burst_rate must be at least 1");
  require(bcc_batch >= 1, "bcc_batch must be at least 1");
  require(users_per_host >= 1, "users_per_host must be at least 1");
}

SimConfig SimConfig::from_config(const KeyValueConfig& kv) {
  SimConfig c;
  auto count = [&](std::string_view key, std::size_t fallback) {
    const auto v = kv.get_int(key, static_cast<long long>(fallback));
    require(v >= 0, std::string(key) + " must be non-negative");
    return static_cast<std::size_t>(v);
  };
  c.n_users = count("n_users", c.n_users);
  c.n_mailing_lists = count("n_mailing_lists", c.n_mailing_lists);
  c.n_spammers = count("n_spammers", c.n_spammers);
  c.sigma = kv.get_double("sigma", c.sigma);
  c.seed = count("seed", c.seed);
  c.steps = count("steps", c.steps);
  c.target_spam_fraction = kv.get_double("target_spam_fraction", c.target_spam_fraction);
  c.recipients_mean = kv.get_double("recipients_mean", c.recipients_mean);
  c.send_prob = kv.get_double("send_prob", c.send_prob);
  c.list_send_prob = kv.get_double("list_send_prob", c.list_send_prob);
  c.list_subscribers = count("list_subscribers", c.list_subscribers);
  c.activation_prob = kv.get_double("activation_prob", c.activation_prob);
  c.burst_rate = count("burst_rate", c.burst_rate);
  c.spam_targets = count("spam_targets", c.spam_targets);
  c.bcc_batch = count("bcc_batch", c.bcc_batch);
  c.personalize = kv.get_bool("personalize", c.personalize);
  c.bogus_headers = kv.get_bool("bogus_headers", c.bogus_headers);
  c.random_words = kv.get_bool("random_words", c.random_words);
  c.random_word_count = count("random_word_count", c.random_word_count);
  c.users_per_host = count("users_per_host", c.users_per_host);
  c.validate();
  return c;
}

void SimConfig::write(std::ostream& out) const {
  out << fmt::format("n_users = {}\n", n_users)
      << fmt::format("n_mailing_lists = {}\n", n_mailing_lists)
      << fmt::format("n_spammers = {}\n", n_spammers) << fmt::format("sigma = {}\n", sigma)
      << fmt::format("seed = {}\n", seed) << fmt::format("steps = {}\n", steps)
      << fmt::format("target_spam_fraction = {}\n", target_spam_fraction)
      << fmt::format("recipients_mean = {}\n", recipients_mean)
      << fmt::format("send_prob = {}\n", send_prob)
      << fmt::format("list_send_prob = {}\n", list_send_prob)
      << fmt::format("list_subscribers = {}\n", list_subscribers)
      << fmt::format("activation_prob = {}\n", activation_prob)
      << fmt::format("burst_rate = {}\n", burst_rate)
      << fmt::format("spam_targets = {}\n", spam_targets)
      << fmt::format("bcc_batch = {}\n", bcc_batch)
      << fmt::format("personalize = {}\n", personalize)
      << fmt::format("bogus_headers = {}\n", bogus_headers)
      << fmt::format("random_words = {}\n", random_words)
      << fmt::format("random_word_count = {}\n", random_word_count)
      << fmt::format("users_per_host = {}\n", users_per_host);
}

std::string format_log_line(const ConnectionLogEntry& e) {
  return fmt::format("{}\t{}\t{}\t{}", e.step, e.origin_host, e.sender_addr, e.recipient_count);
}

std::optional<ConnectionLogEntry> parse_log_line(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  std::string_view fields[4];
  for (int i = 0; i < 4; ++i) {
    const auto tab = line.find('\t');
    if ((i < 3) == (tab == std::string_view::npos)) return std::nullopt;
    fields[i] = line.substr(0, tab);
    line = i < 3 ? line.substr(tab + 1) : std::string_view{};
  }
  ConnectionLogEntry e;
  auto parse_num = [](std::string_view s, auto& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
  };
  if (!parse_num(fields[0], e.step) || !parse_num(fields[3], e.recipient_count)) {
    return std::nullopt;
  }
  if (fields[1].empty() || fields[2].empty() || e.recipient_count < 1) return std::nullopt;
  e.origin_host = std::string(fields[1]);
  e.sender_addr = std::string(fields[2]);
  return e;
}

std::vector<std::size_t> select_recipients(std::size_t sender_index, std::size_t n_users,
                                           std::size_t k, const OffsetSource& offsets) {
  std::vector<std::size_t> out;
  out.reserve(k);
  const auto n = static_cast<long long>(n_users);
  while (out.size() < k) {
    const auto offset = static_cast<long long>(std::llround(offsets()));
    const long long shifted = (static_cast<long long>(sender_index) + offset % n + n) % n;
    const auto r = static_cast<std::size_t>(shifted);
    if (r == sender_index || std::find(out.begin(), out.end(), r) != out.end()) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<std::size_t> select_recipients(std::size_t sender_index, std::size_t n_users,
                                           double sigma, std::size_t k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, sigma);
  return select_recipients(sender_index, n_users, k, [&] { return normal(rng); });
}

std::size_t circular_distance(std::size_t a, std::size_t b, std::size_t n) {
  const std::size_t d = a > b ? a - b : b - a;
  return std::min(d, n - d);
}

std::string personalize(std::string_view body, std::string_view recipient) {
  const auto at = recipient.find('@');
  if (at == std::string_view::npos) {
    throw Error(ErrorCode::MalformedAddress, "no '@' in '" + std::string(recipient) + "'");
  }
  std::string out = "Dear ";
  out.append(recipient.substr(0, at));
  out += ",\n";
  out.append(body);
  return out;
}

Message add_bogus_received(Message m, std::size_t count, Rng& rng) {
  if (count == 0) return m;
  std::uniform_int_distribution<int> octet(1, 254);
  std::uniform_int_distribution<std::uint32_t> id;
  std::uniform_int_distribution<std::uint64_t> stamp(0, 1'000'000);
  std::vector<std::string> bogus;
  bogus.reserve(count + m.received_headers.size());
  for (std::size_t i = 0; i < count; ++i) {
    const auto from = random_host(rng);
    const int a = octet(rng), b = octet(rng), c = octet(rng), d = octet(rng);
    const auto by = random_host(rng);
    const auto sid = id(rng);
    const auto when = stamp(rng);
    bogus.push_back(fmt::format("from {} ([{}.{}.{}.{}]) by {} with SMTP id {:08x}; step {}",
                                from, a, b, c, d, by, sid, when));
  }
  bogus.insert(bogus.end(), std::make_move_iterator(m.received_headers.begin()),
               std::make_move_iterator(m.received_headers.end()));
  m.received_headers = std::move(bogus);
  return m;
}

std::string add_random_words(std::string_view body, const std::vector<std::string>& dictionary,
                             std::size_t count, Rng& rng) {
  if (count == 0) return std::string(body);
  if (dictionary.empty()) throw Error(ErrorCode::EmptyDictionary, "cannot draw random words");
  std::uniform_int_distribution<std::size_t> pick(0, dictionary.size() - 1);
  std::string out(body);
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += '\n';
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out += ' ';
    out += dictionary[pick(rng)];
  }
  return out;
}

World make_world(const SimConfig& config, std::vector<Corpus> ham_topics, Corpus spam,
                 std::vector<std::string> dictionary, Rng& rng) {
  config.validate();
  if (ham_topics.empty()) throw Error(ErrorCode::CorpusMissing, "no ham topic corpora");
  for (const auto& c : ham_topics) {
    if (c.bodies.empty()) throw Error(ErrorCode::CorpusMissing, "topic '" + c.topic + "' is empty");
  }
  if (config.n_spammers > 0 && spam.bodies.empty()) {
    throw Error(ErrorCode::CorpusMissing, "spammers configured but spam corpus is empty");
  }

  World w;
  w.config = config;
  w.ham_topics = std::move(ham_topics);
  w.spam = std::move(spam);
  w.dictionary = std::move(dictionary);
  w.topic_cursor.assign(w.ham_topics.size(), 0);

  const auto n_topics = w.ham_topics.size();
  w.senders.reserve(config.n_users + config.n_mailing_lists + config.n_spammers);
  for (std::size_t i = 0; i < config.n_users; ++i) {
    const auto domain = i / config.users_per_host;
    w.senders.push_back(SenderProfile{
        i, NormalUser{i * n_topics / config.n_users, config.send_prob},
        fmt::format("user{}@d{}.example", i, domain), fmt::format("mx.d{}.example", domain)});
  }

  std::vector<std::string> users;
  users.reserve(config.n_users);
  for (std::size_t i = 0; i < config.n_users; ++i) users.push_back(w.senders[i].address);

  for (std::size_t j = 0; j < config.n_mailing_lists; ++j) {
    MailingList list;
    std::sample(users.begin(), users.end(), std::back_inserter(list.subscribers),
                config.list_subscribers, rng);
    list.send_prob = config.list_send_prob;
    list.topic = j % n_topics;
    w.senders.push_back(SenderProfile{w.senders.size(), std::move(list),
                                      fmt::format("list{}@lists.example", j),
                                      fmt::format("lists{}.example", j)});
  }

  for (std::size_t j = 0; j < config.n_spammers; ++j) {
    Spammer s;
    std::sample(users.begin(), users.end(), std::back_inserter(s.targets), config.spam_targets,
                rng);
    std::shuffle(s.targets.begin(), s.targets.end(), rng);
    s.activation_prob = config.activation_prob;
    s.burst_rate = config.burst_rate;
    s.personalize = config.personalize;
    s.bogus_headers = config.bogus_headers;
    s.random_words = config.random_words;
    w.senders.push_back(SenderProfile{w.senders.size(), std::move(s),
                                      fmt::format("offers{}@bulk{}.example", j, j),
                                      fmt::format("bulk{}.example", j)});
  }
  return w;
}

std::vector<Emission> step(World& world, Rng& rng) {
  std::vector<Emission> out;
  for (auto& sender : world.senders) {
    std::visit(
        [&](auto& kind) {
          using T = std::decay_t<decltype(kind)>;
          if constexpr (std::is_same_v<T, NormalUser>) {
            send_normal(world, sender, kind, rng, out);
          } else if constexpr (std::is_same_v<T, MailingList>) {
            send_list(world, sender, kind, rng, out);
          } else {
            send_spam(world, sender, kind, rng, out);
          }
        },
        sender.kind);
  }
  ++world.current_step;
  return out;
}

std::vector<std::string> build_dictionary(const std::vector<Corpus>& ham_topics) {
  std::set<std::string> words;
  for (const auto& c : ham_topics) {
    for (const auto& b : c.bodies) {
      for (auto& t : tokenize(b)) words.insert(std::move(t));
    }
  }
  return {words.begin(), words.end()};
}

double TrafficTally::spam_fraction() const {
  const auto total = spam_deliveries + ham_deliveries;
  return total == 0 ? 0.0 : static_cast<double>(spam_deliveries) / static_cast<double>(total);
}

TrafficTally pilot_run(const SimConfig& config, std::uint64_t min_deliveries,
                       std::uint64_t max_steps) {
  // Bodies do not influence how many messages are sent, and every random
  // draw made while sending is independent of corpus content, so a stub
  // corpus reproduces the real stream's shape for the same seed.
  Rng rng(config.seed);
  Corpus ham{"pilot", {"pilot ham"}, {}};
  Corpus spam{"pilot", {"pilot spam"}, {}};
  World w = make_world(config, {ham}, spam, {"pilot"}, rng);
  TrafficTally t;
  while (t.spam_deliveries + t.ham_deliveries < min_deliveries && t.steps < max_steps) {
    for (const auto& e : step(w, rng)) {
      const auto n = e.message.recipient_count();
      (e.message.truth == Label::Spam ? t.spam_deliveries : t.ham_deliveries) += n;
      ++t.messages;
    }
    ++t.steps;
  }
  return t;
}

}  // namespace spamlab
