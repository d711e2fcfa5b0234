#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "spamlab/corpus.hpp"
#include "spamlab/errors.hpp"
#include "spamlab/trafficgen.hpp"

namespace spamlab {
namespace {

// Scripted offset draws for the recipient rule.
OffsetSource scripted(std::vector<double> draws) {
  auto state = std::make_shared<std::pair<std::vector<double>, std::size_t>>(std::move(draws), 0);
  return [state] { return state->first.at(state->second++); };
}

SimConfig quiet_config() {
  SimConfig c;
  c.n_users = 100;
  c.n_mailing_lists = 0;
  c.n_spammers = 0;
  c.send_prob = 0.0;
  c.list_send_prob = 0.0;
  c.activation_prob = 0.0;
  return c;
}

World stub_world(const SimConfig& c, Rng& rng,
                 std::vector<std::string> ham = {"plain ham body one", "plain ham body two"},
                 std::vector<std::string> spam = {"cheap pills here", "hot stock tips"}) {
  std::vector<Corpus> topics = {Corpus{"a", ham, {}}, Corpus{"b", ham, {}}};
  return make_world(c, topics, Corpus{"spam", spam, {}}, {"alpha", "beta", "gamma"}, rng);
}

const SenderProfile* sender_by_address(const World& w, const std::string& addr) {
  for (const auto& s : w.senders) {
    if (s.address == addr) return &s;
  }
  return nullptr;
}

TEST(SelectRecipients, ForcedOffsetArithmetic) {
  EXPECT_EQ(select_recipients(5, 10, 1, scripted({2.0})), (std::vector<std::size_t>{7}));
  EXPECT_EQ(select_recipients(9, 10, 1, scripted({3.0})), (std::vector<std::size_t>{2}));
  EXPECT_EQ(select_recipients(1, 10, 1, scripted({-3.0})), (std::vector<std::size_t>{8}));
}

TEST(SelectRecipients, SelfAndDuplicateDrawsAreRedrawn) {
  // 0 and 0.4 round to the sender itself, the second 1.2 repeats index 6.
  EXPECT_EQ(select_recipients(5, 10, 2, scripted({0.0, 0.4, 1.2, 1.2, -1.2})),
            (std::vector<std::size_t>{6, 4}));
}

TEST(SelectRecipients, RoundsHalfAwayFromZero) {
  EXPECT_EQ(select_recipients(5, 10, 1, scripted({2.5})), (std::vector<std::size_t>{8}));
  EXPECT_EQ(select_recipients(5, 10, 1, scripted({-2.5})), (std::vector<std::size_t>{2}));
}

TEST(SelectRecipients, LargeOffsetsWrap) {
  EXPECT_EQ(select_recipients(0, 10, 1, scripted({-23.0})), (std::vector<std::size_t>{7}));
}

TEST(SelectRecipients, MostDrawsStayWithinThreeSigma) {
  Rng rng(3);
  const std::size_t n = 500;
  int near = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    const auto sender = static_cast<std::size_t>(i) % n;
    const auto r = select_recipients(sender, n, 3.0, 1, rng);
    if (circular_distance(sender, r[0], n) <= 9) ++near;
  }
  EXPECT_GE(static_cast<double>(near) / trials, 0.995);
}

TEST(SelectRecipients, DistinctAndNeverSelf) {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const auto r = select_recipients(7, 20, 2.0, 5, rng);
    std::set<std::size_t> unique(r.begin(), r.end());
    ASSERT_EQ(unique.size(), 5u);
    ASSERT_FALSE(unique.contains(7));
  }
}

TEST(Step, NothingFiresWhenAllProbabilitiesAreZero) {
  auto c = quiet_config();
  c.n_spammers = 3;
  c.n_mailing_lists = 2;
  Rng rng(1);
  auto w = stub_world(c, rng);
  for (int i = 0; i < 50; ++i) EXPECT_TRUE(step(w, rng).empty());
}

TEST(Step, PersonalizedBurstArithmetic) {
  auto c = quiet_config();
  c.n_users = 200;
  c.n_spammers = 1;
  c.spam_targets = 100;
  c.burst_rate = 25;
  c.personalize = true;
  c.activation_prob = 1.0;
  Rng rng(2);
  auto w = stub_world(c, rng);
  auto& spammer = std::get<Spammer>(w.senders.back().kind);
  for (int s = 0; s < 4; ++s) {
    const auto out = step(w, rng);
    ASSERT_EQ(out.size(), 25u) << "step " << s;
    for (const auto& e : out) {
      EXPECT_EQ(e.message.truth, Label::Spam);
      EXPECT_EQ(e.message.to_addrs.size(), 1u);
      EXPECT_EQ(e.message.recipient_count(), 1u);
    }
    if (s < 3) EXPECT_EQ(spammer.state, SpammerState::Sending);
  }
  EXPECT_EQ(spammer.state, SpammerState::Idle);
  EXPECT_EQ(spammer.cursor, 0u);
}

TEST(Step, NonPersonalizedSpamIsBatchedIntoBcc) {
  auto c = quiet_config();
  c.n_users = 200;
  c.n_spammers = 1;
  c.spam_targets = 100;
  c.burst_rate = 50;
  c.bcc_batch = 20;
  c.activation_prob = 1.0;
  Rng rng(2);
  auto w = stub_world(c, rng);
  std::set<std::string> reached;
  for (int s = 0; s < 2; ++s) {
    const auto out = step(w, rng);
    ASSERT_EQ(out.size(), 3u);  // 20 + 20 + 10
    for (const auto& e : out) {
      EXPECT_TRUE(e.message.to_addrs.empty());
      EXPECT_EQ(e.log.recipient_count, e.message.bcc_addrs.size());
      reached.insert(e.message.bcc_addrs.begin(), e.message.bcc_addrs.end());
    }
  }
  EXPECT_EQ(reached.size(), 100u);
}

SimConfig busy_config() {
  SimConfig c;
  c.n_users = 120;
  c.n_mailing_lists = 3;
  c.list_subscribers = 7;
  c.list_send_prob = 0.3;
  c.n_spammers = 4;
  c.spam_targets = 30;
  c.burst_rate = 12;
  c.bcc_batch = 5;
  c.activation_prob = 0.2;
  c.send_prob = 0.2;
  c.recipients_mean = 2.0;
  c.bogus_headers = true;
  c.random_words = true;
  c.random_word_count = 4;
  return c;
}

std::vector<Emission> run(World& w, Rng& rng, int steps) {
  std::vector<Emission> all;
  for (int i = 0; i < steps; ++i) {
    for (auto& e : step(w, rng)) all.push_back(std::move(e));
  }
  return all;
}

TEST(Step, FixedSeedReproducesTheStream) {
  auto c = busy_config();
  c.personalize = true;
  std::string a, b, other;
  for (auto* out : {&a, &b}) {
    Rng rng(99);
    auto w = stub_world(c, rng);
    for (const auto& e : run(w, rng, 60)) *out += render_message(e.message) + format_log_line(e.log);
  }
  Rng rng(100);
  auto w = stub_world(c, rng);
  for (const auto& e : run(w, rng, 60)) other += render_message(e.message);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, other);
}

TEST(StepInvariants, TruthFollowsSenderKind) {
  for (bool personalized : {false, true}) {
    auto c = busy_config();
    c.personalize = personalized;
    Rng rng(5);
    auto w = stub_world(c, rng);
    const auto stream = run(w, rng, 200);
    std::set<std::string> ids;
    std::size_t spam = 0;
    for (const auto& e : stream) {
      const auto* s = sender_by_address(w, e.message.from_addr);
      ASSERT_NE(s, nullptr);
      const bool from_spammer = std::holds_alternative<Spammer>(s->kind);
      EXPECT_EQ(e.message.truth == Label::Spam, from_spammer);
      spam += from_spammer;
      EXPECT_GE(e.message.recipient_count(), 1u);
      EXPECT_TRUE(ids.insert(e.message.message_id).second) << "duplicate id";
      EXPECT_EQ(e.log.origin_host, s->host);
      EXPECT_EQ(e.log.sender_addr, s->address);
      EXPECT_EQ(e.log.recipient_count, e.message.recipient_count());
      EXPECT_EQ(e.log.step, e.message.step);
    }
    EXPECT_GT(spam, 0u);
    EXPECT_LT(spam, stream.size());
  }
}

TEST(StepInvariants, HamRecipientsAreDistinctUsersOtherThanTheSender) {
  auto c = busy_config();
  Rng rng(6);
  auto w = stub_world(c, rng);
  for (const auto& e : run(w, rng, 100)) {
    const auto* s = sender_by_address(w, e.message.from_addr);
    if (!std::holds_alternative<NormalUser>(s->kind)) continue;
    const auto r = e.message.all_recipients();
    std::set<std::string> unique(r.begin(), r.end());
    EXPECT_EQ(unique.size(), r.size());
    EXPECT_FALSE(unique.contains(s->address));
  }
}

TEST(StepInvariants, MailingListSendsOneBodyPerIteration) {
  auto c = busy_config();
  Rng rng(7);
  auto w = stub_world(c, rng, {"news one", "news two", "news three"});
  std::map<std::string, std::vector<const Message*>> by_list;
  const auto stream = run(w, rng, 300);
  for (const auto& e : stream) {
    if (e.message.from_addr.starts_with("list")) by_list[e.message.from_addr].push_back(&e.message);
  }
  ASSERT_FALSE(by_list.empty());
  for (const auto& [addr, msgs] : by_list) {
    const auto& list = std::get<MailingList>(sender_by_address(w, addr)->kind);
    const auto n = list.subscribers.size();
    for (std::size_t start = 0; start + n <= msgs.size(); start += n) {
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_EQ(msgs[start + i]->body, msgs[start]->body);
        EXPECT_EQ(msgs[start + i]->to_addrs, std::vector<std::string>{list.subscribers[i]});
        EXPECT_EQ(msgs[start + i]->truth, Label::Ham);
      }
    }
  }
}

TEST(StepInvariants, BurstSharesOneBodyModuloPrefixAndSuffix) {
  auto c = busy_config();
  c.personalize = true;
  c.n_spammers = 1;
  c.activation_prob = 1.0;
  Rng rng(8);
  auto w = stub_world(c, rng);
  // 30 targets at 12 per step: one burst spans exactly three steps.
  const auto stream = run(w, rng, 3);
  std::set<std::string> cores;
  std::size_t spam = 0;
  for (const auto& e : stream) {
    if (e.message.truth != Label::Spam) continue;
    ++spam;
    const auto& body = e.message.body;
    const auto login = e.message.to_addrs[0].substr(0, e.message.to_addrs[0].find('@'));
    ASSERT_TRUE(body.starts_with("Dear " + login + ",\n"));
    const auto after = body.substr(body.find('\n') + 1);
    cores.insert(after.substr(0, after.rfind("\n\n")));
    // Bogus Received lines come before the real one.
    ASSERT_GE(e.message.received_headers.size(), 2u);
    EXPECT_TRUE(e.message.received_headers.back().starts_with("from " + e.message.origin_host));
  }
  EXPECT_EQ(spam, 30u);
  EXPECT_EQ(cores.size(), 1u);
}

TEST(StepInvariants, LogLengthMatchesMessageCount) {
  auto c = busy_config();
  Rng rng(9);
  auto w = stub_world(c, rng);
  std::ostringstream log;
  std::size_t messages = 0;
  for (const auto& e : run(w, rng, 100)) {
    log << format_log_line(e.log) << '\n';
    ++messages;
  }
  std::istringstream in(log.str());
  std::size_t lines = 0;
  std::uint64_t last_step = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    const auto entry = parse_log_line(line);
    ASSERT_TRUE(entry.has_value()) << line;
    EXPECT_GE(entry->step, last_step);
    last_step = entry->step;
  }
  EXPECT_EQ(lines, messages);
}

TEST(ConnectionLog, FormatAndParse) {
  const ConnectionLogEntry e{12, "bulk3.example", "offers3@bulk3.example", 50};
  EXPECT_EQ(format_log_line(e), "12\tbulk3.example\toffers3@bulk3.example\t50");
  EXPECT_EQ(parse_log_line(format_log_line(e)), e);
  EXPECT_FALSE(parse_log_line("12\thost\taddr").has_value());
  EXPECT_FALSE(parse_log_line("12\thost\taddr\t0").has_value());
  EXPECT_FALSE(parse_log_line("x\thost\taddr\t1").has_value());
}

TEST(Personalize, Examples) {
  EXPECT_EQ(personalize("buy pills", "alice@example.org"), "Dear alice,\nbuy pills");
  EXPECT_EQ(personalize("", "bob@x.y"), "Dear bob,\n");
  try {
    personalize("hi", "noatsign");
    FAIL() << "expected MalformedAddress";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedAddress);
  }
}

TEST(BogusReceived, Examples) {
  Message m;
  m.received_headers = {"from real"};
  Rng rng(1);
  EXPECT_EQ(add_bogus_received(m, 0, rng), m);

  Rng a(42), b(42);
  const auto x = add_bogus_received(m, 2, a);
  const auto y = add_bogus_received(m, 2, b);
  ASSERT_EQ(x.received_headers.size(), 3u);
  EXPECT_EQ(x.received_headers.back(), "from real");
  EXPECT_EQ(x, y);
  EXPECT_NE(x.received_headers[0], x.received_headers[1]);
}

TEST(RandomWords, Examples) {
  Rng rng(1);
  EXPECT_EQ(add_random_words("body", {"x"}, 0, rng), "body");
  EXPECT_EQ(add_random_words("body", {"a"}, 5, rng), "body\n\na a a a a");
  EXPECT_EQ(add_random_words("body\n", {"a"}, 2, rng), "body\n\na a");

  std::vector<std::string> dict;
  for (int i = 0; i < 1000; ++i) dict.push_back("w" + std::to_string(i));
  Rng r1(77), r2(77);
  const auto s1 = add_random_words("body", dict, 3, r1);
  EXPECT_EQ(s1, add_random_words("body", dict, 3, r2));
  const auto suffix = s1.substr(6);
  EXPECT_EQ(std::count(suffix.begin(), suffix.end(), ' '), 2);

  try {
    add_random_words("body", {}, 1, rng);
    FAIL() << "expected EmptyDictionary";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyDictionary);
  }
}

TEST(SimConfigFile, ParsesDocumentedKeys) {
  const auto kv = KeyValueConfig::parse(
      "# comment\n"
      "n_users = 50\nn_mailing_lists = 1\nn_spammers = 2\nsigma = 4.5\nseed = 9\n"
      "steps = 10\ntarget_spam_fraction = 0.3\nrecipients_mean = 1.5\npersonalize = yes\n");
  const auto c = SimConfig::from_config(kv);
  EXPECT_EQ(c.n_users, 50u);
  EXPECT_EQ(c.n_spammers, 2u);
  EXPECT_DOUBLE_EQ(c.sigma, 4.5);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_DOUBLE_EQ(c.target_spam_fraction, 0.3);
  EXPECT_TRUE(c.personalize);

  std::ostringstream out;
  c.write(out);
  const auto again = SimConfig::from_config(KeyValueConfig::parse(out.str()));
  std::ostringstream out2;
  again.write(out2);
  EXPECT_EQ(out.str(), out2.str());
}

TEST(SimConfigFile, RejectsInvalidValues) {
  for (const char* text : {"sigma = 0", "target_spam_fraction = 1.5", "n_users = 1",
                           "n_users = many", "send_prob = -0.1"}) {
    try {
      SimConfig::from_config(KeyValueConfig::parse(text));
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid) << text;
    }
  }
}

TEST(MakeWorld, RequiresCorpora) {
  SimConfig c;
  Rng rng(1);
  try {
    make_world(c, {}, Corpus{}, {}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CorpusMissing);
  }
  try {
    make_world(c, {Corpus{"a", {"x"}, {}}}, Corpus{}, {}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CorpusMissing);
  }
}

TEST(Calibrate, ZeroTargetWithoutSpammersIsUnchanged) {
  SimConfig c;
  c.n_spammers = 0;
  c.target_spam_fraction = 0.0;
  const auto out = calibrate_spam_fraction(c);
  EXPECT_EQ(out.activation_prob, c.activation_prob);
}

TEST(Calibrate, UnreachableTargetFails) {
  SimConfig c;
  c.n_users = 1000;
  c.n_mailing_lists = 0;
  c.n_spammers = 1;
  c.send_prob = 0.5;
  c.target_spam_fraction = 0.99;
  // The pilot oracle: even a spammer that re-activates every step stays far
  // below the target.
  SimConfig ceiling = c;
  ceiling.activation_prob = 1.0;
  EXPECT_LT(pilot_run(ceiling, 20'000).spam_fraction(), 0.2);
  try {
    calibrate_spam_fraction(c);
    FAIL() << "expected CalibrationFailed";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CalibrationFailed);
  }
}

TEST(Calibrate, DefaultTopologyReachesFortyPercent) {
  SimConfig c;
  c.target_spam_fraction = 0.4;
  CalibrationOptions opts;
  opts.pilot_deliveries = 20'000;
  const auto out = calibrate_spam_fraction(c, opts);
  const auto tally = pilot_run(out, 20'000);
  EXPECT_GE(tally.spam_deliveries + tally.ham_deliveries, 20'000u);
  EXPECT_GE(tally.spam_fraction(), 0.38);
  EXPECT_LE(tally.spam_fraction(), 0.42);
}

}  // namespace
}  // namespace spamlab
