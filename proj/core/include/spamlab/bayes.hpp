#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "spamlab/corpus.hpp"
#include "spamlab/message.hpp"
#include "spamlab/verdict.hpp"

namespace spamlab::bayes {

inline constexpr double kMinSpaminess = 0.01;
inline constexpr double kMaxSpaminess = 0.99;
inline constexpr double kNeutral = 0.5;

struct WordCounts {
  std::uint64_t spam = 0;
  std::uint64_t ham = 0;
};

/// Occurrence counts of a trained naive Bayes filter plus its decision
/// parameters. Immutable once trained.
struct Model {
  std::unordered_map<std::string, WordCounts> counts;
  std::uint64_t n_spam_msgs = 0;
  std::uint64_t n_ham_msgs = 0;
  std::size_t n_interesting = 15;
  double threshold = 0.9;
  double prior_spam = 0.5;

  double prior_ham() const { return 1.0 - prior_spam; }
  std::uint64_t spam_count(const std::string& w) const;
  std::uint64_t ham_count(const std::string& w) const;
};

/// (S/N_S) / (S/N_S + H/N_H), 0.5 for unseen words, clamped to [0.01, 0.99].
double word_spaminess(const Model& model, const std::string& word);

/// The classification input of a message: tokens of subject and body.
std::vector<Token> message_tokens(const Message& m);

/// Distinct tokens of the message ranked by |spaminess - 0.5| (ties by
/// token), truncated to the model's n_interesting.
std::vector<Token> interesting_words(const Model& model, const Message& m);

/// Two-class Bayes rule over per-word probabilities, evaluated in log space.
double posterior_spam(std::span<const double> probs, double prior_spam);
double posterior_ham(std::span<const double> probs, double prior_spam);

double posterior_spam(const Model& model, const std::vector<Token>& words);
double posterior_ham(const Model& model, const std::vector<Token>& words);

/// SPAM iff the posterior strictly exceeds the threshold. A message without
/// tokens is HAM with score prior_spam.
Verdict classify(const Model& model, const Message& m);

struct TrainOptions {
  std::size_t n_interesting = 15;
  double threshold = 0.9;
};

/// Throws Error{EmptyTrainingSet} when either side is empty.
Model train(const std::vector<Message>& ham, const std::vector<Message>& spam,
            const TrainOptions& opts = {});
Model train(const std::filesystem::path& ham_mbox, const std::filesystem::path& spam_mbox,
            const TrainOptions& opts = {});

void save(const Model& model, std::ostream& out);
Model load(std::istream& in);

}  // namespace spamlab::bayes
