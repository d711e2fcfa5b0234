#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spamlab::synth {

struct CorpusSpec {
  std::vector<std::string> topics = {"comp", "rec", "sci"};
  std::size_t ham_per_topic = 60;
  std::size_t spam_count = 60;
  std::size_t vocabulary = 120;  // words per topic / spam vocabulary
  std::size_t shared_vocabulary = 40;
  std::size_t words_per_body = 60;
  double shared_fraction = 0.2;       // share of body words drawn from the shared pool
  double spam_ham_overlap = 0.1;      // share of spam words borrowed from ham topics
  bool mbox = false;                  // one mbox per topic instead of one file per body
  std::uint64_t seed = 7;
};

/// Writes ham/<topic>/NNNN.txt and spam/NNNN.txt under `root` (or
/// ham/<topic>.mbox and spam.mbox). Each topic and the spam set draw most
/// words from their own vocabulary and some from a shared pool; spam also
/// borrows from the ham topics.
void write_sample_corpora(const std::filesystem::path& root, const CorpusSpec& spec = {});

}  // namespace spamlab::synth
