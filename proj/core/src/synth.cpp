#include "spamlab/synth.hpp"

#include <fstream>
#include <random>
#include <set>

#include <fmt/format.h>

#include "spamlab/errors.hpp"
#include "spamlab/mbox.hpp"

namespace spamlab::synth {
namespace {

constexpr std::string_view kOnsets[] = {"b", "br", "c", "ch", "d", "f", "g", "gr", "h", "k", "l",
                                        "m", "n", "p", "pl", "r", "s", "st", "t", "tr", "v", "w"};
constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ea"};
constexpr std::string_view kCodas[] = {"", "n", "r", "s", "t", "x", "ck", "ng", "m"};

using Vocabulary = std::vector<std::string>;

Vocabulary make_vocabulary(std::size_t n, std::set<std::string>& taken, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> onset(0, std::size(kOnsets) - 1);
  std::uniform_int_distribution<std::size_t> vowel(0, std::size(kVowels) - 1);
  std::uniform_int_distribution<std::size_t> coda(0, std::size(kCodas) - 1);
  std::uniform_int_distribution<int> syllables(2, 3);
  Vocabulary words;
  while (words.size() < n) {
    std::string w;
    for (int s = syllables(rng); s > 0; --s) {
      w += kOnsets[onset(rng)];
      w += kVowels[vowel(rng)];
    }
    w += kCodas[coda(rng)];
    if (taken.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

// Weighted mixture of vocabularies; each word is drawn from pool i with
// probability weights[i].
std::string make_body(const std::vector<const Vocabulary*>& pools, const std::vector<double>& weights,
                      std::size_t n_words, std::mt19937_64& rng) {
  std::discrete_distribution<std::size_t> which(weights.begin(), weights.end());
  std::string body;
  for (std::size_t i = 0; i < n_words; ++i) {
    if (i > 0) body += (i % 12 == 0) ? (i % 36 == 0 ? "\n\n" : "\n") : " ";
    const auto& pool = *pools[which(rng)];
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    body += pool[pick(rng)];
  }
  body += '\n';
  return body;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + p.string());
}

void write_bodies(const std::filesystem::path& dir_or_file, const std::vector<std::string>& bodies,
                  bool as_mbox) {
  namespace fs = std::filesystem;
  if (as_mbox) {
    fs::create_directories(dir_or_file.parent_path());
    std::vector<Message> messages;
    messages.reserve(bodies.size());
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      Message m;
      m.from_addr = "corpus@synth.example";
      m.message_id = fmt::format("<{}@synth.example>", i);
      m.body = bodies[i];
      messages.push_back(std::move(m));
    }
    mbox::write_messages(dir_or_file, messages);
    return;
  }
  fs::create_directories(dir_or_file);
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    write_file(dir_or_file / fmt::format("{:05}.txt", i), bodies[i]);
  }
}

}  // namespace

void write_sample_corpora(const std::filesystem::path& root, const CorpusSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::set<std::string> taken;
  const auto shared = make_vocabulary(spec.shared_vocabulary, taken, rng);

  std::vector<Vocabulary> topic_vocab;
  for (std::size_t t = 0; t < spec.topics.size(); ++t) {
    topic_vocab.push_back(make_vocabulary(spec.vocabulary, taken, rng));
  }
  const auto spam_vocab = make_vocabulary(spec.vocabulary, taken, rng);

  for (std::size_t t = 0; t < spec.topics.size(); ++t) {
    std::vector<std::string> bodies;
    for (std::size_t i = 0; i < spec.ham_per_topic; ++i) {
      bodies.push_back(make_body({&topic_vocab[t], &shared},
                                 {1.0 - spec.shared_fraction, spec.shared_fraction},
                                 spec.words_per_body, rng));
    }
    const auto& topic = spec.topics[t];
    write_bodies(spec.mbox ? root / "ham" / (topic + ".mbox") : root / "ham" / topic, bodies, spec.mbox);
  }

  std::vector<const Vocabulary*> pools = {&spam_vocab, &shared};
  const double own = 1.0 - spec.shared_fraction - spec.spam_ham_overlap;
  std::vector<double> weights = {own, spec.shared_fraction};
  for (const auto& v : topic_vocab) {
    pools.push_back(&v);
    weights.push_back(spec.spam_ham_overlap / static_cast<double>(topic_vocab.size()));
  }
  std::vector<std::string> bodies;
  for (std::size_t i = 0; i < spec.spam_count; ++i) {
    bodies.push_back(make_body(pools, weights, spec.words_per_body, rng));
  }
  write_bodies(spec.mbox ? root / "spam.mbox" : root / "spam", bodies, spec.mbox);
}

}  // namespace spamlab::synth
