#include <gtest/gtest.h>

#include <random>
#include <map>
#include <sstream>

#include "spamlab/bulk.hpp"
#include "spamlab/errors.hpp"

namespace spamlab::bulk {
namespace {

ConnectionLogEntry entry(const std::string& host, std::size_t recipients = 1) {
  return {0, host, "someone@" + host, recipients};
}

Message body_message(std::string body) {
  Message m;
  m.from_addr = "offers@bulk.example";
  m.origin_host = "bulk.example";
  m.bcc_addrs = {"a@b.example"};
  m.body = std::move(body);
  return m;
}

// Recount over the trailing window for every position.
std::vector<Label> brute_force_volume(const std::vector<ConnectionLogEntry>& stream,
                                      std::size_t window, std::uint64_t threshold, bool by_recipients) {
  std::vector<Label> out;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const std::size_t begin = i > window ? i - window : 0;
    std::uint64_t n = 0;
    for (std::size_t j = begin; j < i; ++j) {
      if (stream[j].origin_host == stream[i].origin_host) n += by_recipients ? stream[j].recipient_count : 1;
    }
    out.push_back(n > threshold ? Label::Spam : Label::Ham);
  }
  return out;
}

TEST(VolumeClassify, EmptyWindowIsHam) {
  VolumeWindow w(1500, 100);
  EXPECT_EQ(volume_classify(w, entry("h")).label, Label::Ham);
  EXPECT_EQ(w.size(), 1u);
}

TEST(VolumeClassify, HeavyHostIsSpam) {
  VolumeWindow w(1500, 100);
  for (int i = 0; i < 150; ++i) w.append(entry("h"));
  EXPECT_EQ(volume_classify(w, entry("h")).label, Label::Spam);
  EXPECT_EQ(volume_classify(w, entry("other")).label, Label::Ham);
}

TEST(VolumeClassify, ThresholdIsStrict) {
  VolumeWindow w(1500, 100);
  for (int i = 0; i < 100; ++i) w.append(entry("h"));
  EXPECT_EQ(volume_classify(w, entry("h")).label, Label::Ham);  // 100 seen
  EXPECT_EQ(volume_classify(w, entry("h")).label, Label::Spam);  // 101 seen
}

TEST(VolumeClassify, OldEntriesAreEvicted) {
  VolumeWindow w(1500, 100);
  for (int i = 0; i < 1500; ++i) w.append(entry("h"));
  for (int i = 0; i < 1500; ++i) w.append(entry("other" + std::to_string(i % 7)));
  EXPECT_EQ(w.count_for("h"), 0u);
  EXPECT_EQ(volume_classify(w, entry("h")).label, Label::Ham);
  EXPECT_EQ(w.size(), 1500u);
}

TEST(VolumeClassify, MessageOverloadUsesOriginHost) {
  VolumeWindow w(10, 0);
  auto m = body_message("x");
  EXPECT_EQ(volume_classify(w, m).label, Label::Ham);
  EXPECT_EQ(volume_classify(w, m).label, Label::Spam);
}

TEST(VolumeProperty, StreamingEqualsBruteForce) {
  std::mt19937_64 rng(31);
  for (bool by_recipients : {false, true}) {
    for (const auto [window, threshold] : {std::pair<std::size_t, std::uint64_t>{50, 5}, {200, 30}, {7, 1}}) {
      std::vector<ConnectionLogEntry> stream;
      std::discrete_distribution<int> host({10, 3, 3, 1, 1, 1});
      std::uniform_int_distribution<std::size_t> recipients(1, 4);
      for (int i = 0; i < 3000; ++i) stream.push_back(entry("h" + std::to_string(host(rng)), recipients(rng)));
      const auto expected = brute_force_volume(stream, window, threshold, by_recipients);
      VolumeWindow w(window, threshold, by_recipients ? VolumeWeight::Recipients : VolumeWeight::Messages);
      for (std::size_t i = 0; i < stream.size(); ++i) {
        ASSERT_EQ(volume_classify(w, stream[i]).label, expected[i]) << "position " << i;
        ASSERT_LE(w.size(), window);
      }
    }
  }
}

TEST(BodyChecksum, Examples) {
  const std::string alice = "Dear alice,\nbuy pills";
  const std::string bob = "Dear bob,\nbuy pills";
  EXPECT_EQ(body_checksum(alice, false), body_checksum(alice, false));
  EXPECT_EQ(body_checksum(alice, true), body_checksum(alice, true));
  EXPECT_EQ(fuzzy_normalize(alice), "buy pills");
  EXPECT_EQ(fuzzy_normalize(bob), "buy pills");
  EXPECT_EQ(body_checksum(alice, true), body_checksum(bob, true));
  EXPECT_NE(body_checksum(alice, false), body_checksum(bob, false));
}

TEST(BodyChecksum, FuzzyDropsTrailingParagraph) {
  EXPECT_EQ(fuzzy_normalize("Buy pills\nnow\n\nzebra apple kiwi\n"), "buy pills now");
  EXPECT_EQ(fuzzy_normalize("Buy pills\n\nmore text\n\nrandom words"), "buy pills more text");
  EXPECT_EQ(fuzzy_normalize("single paragraph\n\n\n"), "single paragraph");
  EXPECT_EQ(fuzzy_normalize("Dear Sir or Madam,\nhello"), "dear sir or madam, hello");
}

TEST(BodyChecksumProperty, FuzzyIgnoresCaseAndWhitespaceRuns) {
  std::mt19937_64 rng(32);
  const std::vector<std::string> words = {"Buy", "cheap", "PILLS", "now", "Offer", "x"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<int> gap(1, 4);
  for (int i = 0; i < 500; ++i) {
    std::string a, b;
    for (int k = 0; k < 8; ++k) {
      const auto& w = words[pick(rng)];
      a += w + " ";
      std::string upper = w;
      for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      b += upper + std::string(static_cast<std::size_t>(gap(rng)), k % 3 ? ' ' : '\t');
    }
    ASSERT_EQ(body_checksum(a, true), body_checksum(b, true)) << a << "|" << b;
  }
}

TEST(ChecksumClassify, Examples) {
  ChecksumDB db(5);
  const auto m = body_message("limited offer");
  EXPECT_EQ(checksum_classify(db, m, false).label, Label::Ham);
  EXPECT_EQ(db.count(body_checksum(m.body, false)), 1u);
  for (int i = 2; i <= 5; ++i) EXPECT_EQ(checksum_classify(db, m, false).label, Label::Ham) << i;
  EXPECT_EQ(checksum_classify(db, m, false).label, Label::Spam);  // sixth copy
}

TEST(ChecksumClassify, PersonalizedVariantsCollapseUnderFuzzy) {
  ChecksumDB fuzzy(5), raw(5);
  std::vector<Label> fuzzy_labels, raw_labels;
  for (int i = 0; i < 6; ++i) {
    const auto m = body_message("Dear user" + std::to_string(i) + ",\nlimited offer");
    fuzzy_labels.push_back(checksum_classify(fuzzy, m, true).label);
    raw_labels.push_back(checksum_classify(raw, m, false).label);
  }
  EXPECT_EQ(fuzzy_labels.back(), Label::Spam);
  EXPECT_EQ(std::count(fuzzy_labels.begin(), fuzzy_labels.end(), Label::Spam), 1);
  EXPECT_EQ(std::count(raw_labels.begin(), raw_labels.end(), Label::Spam), 0);
}

TEST(ChecksumProperty, VerdictDependsOnlyOnPriorCopiesOfTheSameDigest) {
  std::mt19937_64 rng(33);
  const std::vector<std::string> bodies = {"a a", "b b", "c c", "d d"};
  std::uniform_int_distribution<std::size_t> pick(0, bodies.size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    ChecksumDB db(3);
    std::map<std::string, int> seen;
    for (int i = 0; i < 60; ++i) {
      const auto& b = bodies[pick(rng)];
      const auto v = checksum_classify(db, body_message(b), false);
      ASSERT_EQ(v.label, seen[b] >= 3 ? Label::Spam : Label::Ham);
      ++seen[b];
    }
  }
}

TEST(ChecksumDB, SaveLoadRoundTrip) {
  ChecksumDB db(5);
  db.report(0x10);
  db.report(0x10);
  db.report(0xffffffffffffffffULL);
  std::stringstream buf;
  db.save(buf);
  EXPECT_EQ(buf.str(), "0000000000000010\t2\nffffffffffffffff\t1\n");
  const auto back = ChecksumDB::load(buf, 5);
  EXPECT_EQ(back.count(0x10), 2u);
  EXPECT_EQ(back.count(0xffffffffffffffffULL), 1u);
  std::stringstream bad("zz\tq\n");
  EXPECT_THROW(ChecksumDB::load(bad, 5), Error);
}

}  // namespace
}  // namespace spamlab::bulk
