#include "spamlab/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "spamlab/errors.hpp"
#include "spamlab/mbox.hpp"

namespace spamlab::bayes {
namespace {

// log-odds of ham over spam; the posteriors are logistic functions of it.
double ham_log_odds(std::span<const double> probs, double prior_spam) {
  double log_spam = std::log(prior_spam);
  double log_ham = std::log1p(-prior_spam);
  for (double p : probs) {
    log_spam += std::log(p);
    log_ham += std::log1p(-p);
  }
  return log_ham - log_spam;
}

std::vector<double> spaminess_of(const Model& model, const std::vector<Token>& words) {
  std::vector<double> probs;
  probs.reserve(words.size());
  for (const auto& w : words) probs.push_back(word_spaminess(model, w));
  return probs;
}

void count_into(const std::vector<Message>& messages, bool spam, Model& model) {
  for (const auto& m : messages) {
    for (auto& t : message_tokens(m)) {
      auto& c = model.counts[std::move(t)];
      ++(spam ? c.spam : c.ham);
    }
  }
}

}  // namespace

std::uint64_t Model::spam_count(const std::string& w) const {
  auto it = counts.find(w);
  return it == counts.end() ? 0 : it->second.spam;
}

std::uint64_t Model::ham_count(const std::string& w) const {
  auto it = counts.find(w);
  return it == counts.end() ? 0 : it->second.ham;
}

double word_spaminess(const Model& model, const std::string& word) {
  const auto it = model.counts.find(word);
  if (it == model.counts.end() || (it->second.spam == 0 && it->second.ham == 0)) return kNeutral;
  const double spam_rate =
      static_cast<double>(it->second.spam) / static_cast<double>(model.n_spam_msgs);
  const double ham_rate = static_cast<double>(it->second.ham) / static_cast<double>(model.n_ham_msgs);
  return std::clamp(spam_rate / (spam_rate + ham_rate), kMinSpaminess, kMaxSpaminess);
}

std::vector<Token> message_tokens(const Message& m) {
  auto tokens = tokenize(m.subject);
  auto body = tokenize(m.body);
  tokens.insert(tokens.end(), std::make_move_iterator(body.begin()),
                std::make_move_iterator(body.end()));
  return tokens;
}

std::vector<Token> interesting_words(const Model& model, const Message& m) {
  auto tokens = message_tokens(m);
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

  std::vector<std::pair<double, Token>> ranked;
  ranked.reserve(tokens.size());
  for (auto& t : tokens) {
    const double distance = std::abs(word_spaminess(model, t) - kNeutral);
    ranked.emplace_back(distance, std::move(t));
  }
  const auto keep = std::min(model.n_interesting, ranked.size());
  auto by_interest = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), by_interest);

  std::vector<Token> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(std::move(ranked[i].second));
  return out;
}

double posterior_spam(std::span<const double> probs, double prior_spam) {
  return 1.0 / (1.0 + std::exp(ham_log_odds(probs, prior_spam)));
}

double posterior_ham(std::span<const double> probs, double prior_spam) {
  return 1.0 / (1.0 + std::exp(-ham_log_odds(probs, prior_spam)));
}

double posterior_spam(const Model& model, const std::vector<Token>& words) {
  return posterior_spam(spaminess_of(model, words), model.prior_spam);
}

double posterior_ham(const Model& model, const std::vector<Token>& words) {
  return posterior_ham(spaminess_of(model, words), model.prior_spam);
}

Verdict classify(const Model& model, const Message& m) {
  const auto words = interesting_words(model, m);
  if (words.empty()) return {Label::Ham, model.prior_spam};
  const double p = posterior_spam(model, words);
  return {p > model.threshold ? Label::Spam : Label::Ham, p};
}

Model train(const std::vector<Message>& ham, const std::vector<Message>& spam,
            const TrainOptions& opts) {
  if (ham.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no ham training messages");
  if (spam.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no spam training messages");
  Model model;
  model.n_interesting = opts.n_interesting;
  model.threshold = opts.threshold;
  model.n_ham_msgs = ham.size();
  model.n_spam_msgs = spam.size();
  model.prior_spam = static_cast<double>(spam.size()) / static_cast<double>(spam.size() + ham.size());
  count_into(ham, false, model);
  count_into(spam, true, model);
  return model;
}

Model train(const std::filesystem::path& ham_mbox, const std::filesystem::path& spam_mbox,
            const TrainOptions& opts) {
  return train(mbox::read_messages(ham_mbox), mbox::read_messages(spam_mbox), opts);
}

void save(const Model& model, std::ostream& out) {
  out << "spamlab-bayes\t1\n"
      << fmt::format("n_spam_msgs\t{}\n", model.n_spam_msgs)
      << fmt::format("n_ham_msgs\t{}\n", model.n_ham_msgs)
      << fmt::format("n_interesting\t{}\n", model.n_interesting)
      << fmt::format("threshold\t{:.17g}\n", model.threshold)
      << fmt::format("prior_spam\t{:.17g}\n", model.prior_spam) << "\n";
  std::vector<const std::pair<const std::string, WordCounts>*> rows;
  rows.reserve(model.counts.size());
  for (const auto& row : model.counts) rows.push_back(&row);
  std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->first < b->first; });
  for (const auto* row : rows) {
    out << fmt::format("{}\t{}\t{}\n", row->first, row->second.spam, row->second.ham);
  }
}

Model load(std::istream& in) {
  auto fail = [](const std::string& why) -> Model {
    throw Error(ErrorCode::IoFailure, "bad Bayes model dump: " + why);
  };
  std::string line;
  if (!std::getline(in, line) || line != "spamlab-bayes\t1") return fail("missing magic line");
  Model model;
  while (std::getline(in, line) && !line.empty()) {
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "n_spam_msgs") fields >> model.n_spam_msgs;
    else if (key == "n_ham_msgs") fields >> model.n_ham_msgs;
    else if (key == "n_interesting") fields >> model.n_interesting;
    else if (key == "threshold") fields >> model.threshold;
    else if (key == "prior_spam") fields >> model.prior_spam;
    else return fail("unknown header key " + key);
    if (!fields) return fail("bad value for " + key);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) return fail("bad row '" + line + "'");
    WordCounts c{std::stoull(line.substr(t1 + 1, t2 - t1 - 1)), std::stoull(line.substr(t2 + 1))};
    model.counts.emplace(line.substr(0, t1), c);
  }
  return model;
}

}  // namespace spamlab::bayes
