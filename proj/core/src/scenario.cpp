#include "spamlab/scenario.hpp"

#include <fstream>

#include <fmt/format.h>

#include "spamlab/errors.hpp"
#include "spamlab/report.hpp"

namespace spamlab {
namespace {

Corpus load_or_missing(const std::filesystem::path& path) {
  try {
    return load_corpus(path, path.filename().string());
  } catch (const Error& e) {
    throw Error(ErrorCode::CorpusMissing, e.what());
  }
}

struct FilterSlot {
  FilterBinding binding;
  std::unique_ptr<Filter> filter;
  ConfusionCounts counts;
  std::uint64_t errors = 0;
  bool enabled = true;
};

bool user_level_training(const std::vector<FilterSlot>& slots) {
  for (const auto& s : slots) {
    if (s.binding.needs_training && s.binding.level == Level::User) return true;
  }
  return false;
}

}  // namespace

void Scenario::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::ConfigInvalid, what);
  };
  sim.validate();
  require(eval_steps >= 1, "eval_steps must be at least 1");
  require(!filters.empty(), "scenario has no filters");
  require(!ham_corpora.empty(), "scenario has no ham_corpus");
  require(sim.n_spammers == 0 || !spam_corpus.empty(), "spammers configured without spam_corpus");
  require(epsilon > 0.0, "epsilon must be positive");
  require(params.bayes.n_interesting >= 1, "bayes_n must be at least 1");
  require(params.bayes.threshold > 0.0 && params.bayes.threshold < 1.0,
          "bayes_threshold must lie in (0,1)");
  for (const auto& f : filters) f.validate();
  for (std::size_t i = 0; i < filters.size(); ++i) {
    for (std::size_t j = i + 1; j < filters.size(); ++j) {
      require(filters[i].name != filters[j].name || filters[i].level != filters[j].level,
              "duplicate filter '" + filters[i].name + "' at the same level");
    }
  }
}

Scenario Scenario::from_config(const KeyValueConfig& kv) {
  Scenario s;
  s.name = kv.get_string("name", s.name);
  s.level = parse_level(kv.get_string("level", "U"));
  s.sim = SimConfig::from_config(kv);
  s.personalized = kv.get_bool("personalized", s.sim.personalize);
  s.sim.personalize = s.personalized;
  if (auto p = kv.get("spam_corpus")) s.spam_corpus = kv.resolve(*p);
  for (const auto& p : kv.get_all("ham_corpus")) s.ham_corpora.push_back(kv.resolve(p));
  for (const auto& f : kv.get_all("filter")) s.filters.push_back(FilterBinding::parse(f, s.level));

  auto count = [&](std::string_view key, std::uint64_t fallback) {
    const auto v = kv.get_int(key, static_cast<long long>(fallback));
    if (v < 0) throw Error(ErrorCode::ConfigInvalid, std::string(key) + " must be non-negative");
    return static_cast<std::uint64_t>(v);
  };
  s.training_steps = count("training_steps", s.training_steps);
  s.eval_steps = count("eval_steps", s.eval_steps);
  s.calibrate = kv.get_bool("calibrate", s.calibrate);
  s.epsilon = kv.get_double("epsilon", s.epsilon);
  s.params.bayes.n_interesting = count("bayes_n", s.params.bayes.n_interesting);
  s.params.bayes.threshold = kv.get_double("bayes_threshold", s.params.bayes.threshold);
  s.params.volume_window = count("volume_window", s.params.volume_window);
  s.params.volume_threshold = count("volume_threshold", s.params.volume_threshold);
  s.params.bulk_threshold = count("bulk_threshold", s.params.bulk_threshold);
  const auto weight = kv.get_string("volume_weight", "messages");
  if (weight == "messages") {
    s.params.volume_weight = bulk::VolumeWeight::Messages;
  } else if (weight == "recipients") {
    s.params.volume_weight = bulk::VolumeWeight::Recipients;
  } else {
    throw Error(ErrorCode::ConfigInvalid, "volume_weight must be messages or recipients");
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  return from_config(KeyValueConfig::load(path));
}

ScenarioOutcome run_scenario(const Scenario& s, const std::filesystem::path& out_dir) {
  s.validate();
  std::vector<Corpus> ham;
  for (const auto& p : s.ham_corpora) ham.push_back(load_or_missing(p));
  Corpus spam;
  if (!s.spam_corpus.empty()) spam = load_or_missing(s.spam_corpus);

  ScenarioOutcome outcome;
  SimConfig sim = s.sim;
  sim.personalize = s.personalized;
  if (s.calibrate) sim = calibrate_spam_fraction(sim);
  outcome.effective_sim = sim;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + out_dir.string());

  Rng rng(sim.seed);
  auto dictionary = build_dictionary(ham);
  World world = make_world(sim, std::move(ham), std::move(spam), std::move(dictionary), rng);

  std::vector<FilterSlot> slots;
  for (const auto& b : s.filters) slots.push_back({b, make_filter(b, s.params), {}, 0, true});

  bool any_training = false;
  for (const auto& slot : slots) any_training = any_training || slot.binding.needs_training;

  // Phase 1: labelled traffic for the trainers. The world advances the same
  // number of steps whether or not anything is trained, so evaluation traffic
  // does not depend on the filter list.
  std::vector<Message> training_stream;
  for (std::uint64_t i = 0; i < s.training_steps; ++i) {
    for (auto& e : step(world, rng)) {
      ++outcome.training_messages;
      if (any_training) training_stream.push_back(std::move(e.message));
    }
  }
  if (any_training) {
    const auto sets = emit_training_sets(training_stream, user_level_training(slots), out_dir / "training");
    training_stream.clear();
    training_stream.shrink_to_fit();
    for (auto& slot : slots) {
      if (!slot.binding.needs_training) continue;
      try {
        slot.filter->train(sets);
      } catch (const Error& e) {
        slot.enabled = false;
        outcome.footnotes.push_back(fmt::format("{} ({}): not evaluated, {}", slot.binding.name,
                                                to_string(slot.binding.level), e.what()));
      }
    }
  }

  // Phase 2: evaluation. Each server-level message is logged before any
  // filter sees it.
  const auto connlog_path = out_dir / "connections.log";
  std::ofstream connlog(connlog_path, std::ios::binary | std::ios::trunc);
  if (!connlog) throw Error(ErrorCode::IoFailure, "cannot write " + connlog_path.string());

  for (std::uint64_t i = 0; i < s.eval_steps; ++i) {
    for (const auto& e : step(world, rng)) {
      ++outcome.eval_messages;
      if (e.message.truth == Label::Spam) ++outcome.eval_spam_messages;
      connlog << format_log_line(e.log) << '\n';
      connlog.flush();
      const auto recipients = e.message.all_recipients();
      for (auto& slot : slots) {
        if (!slot.enabled) continue;
        auto evaluate = [&](const ClassifyContext& ctx) {
          try {
            slot.counts.record(e.message.truth, slot.filter->classify(e.message, ctx).label);
          } catch (const Error& err) {
            if (err.code() != ErrorCode::WrapperCrashed) throw;
            ++slot.errors;
          }
        };
        if (slot.binding.level == Level::Server) {
          evaluate(ClassifyContext{{}, &e.log, connlog_path});
        } else {
          for (const auto& r : recipients) evaluate(ClassifyContext{r, nullptr, std::nullopt});
        }
      }
    }
  }

  std::vector<FilterResult> results;
  bool missing_spam = false, missing_ham = false;
  for (auto& slot : slots) {
    if (!slot.enabled) continue;
    auto r = make_result(slot.binding, slot.counts, slot.errors, s.epsilon);
    missing_spam = missing_spam || !r.far_defined;
    missing_ham = missing_ham || !r.frr_defined;
    if (slot.errors > 0) {
      outcome.footnotes.push_back(fmt::format("{} ({}): {} wrapper errors excluded from the rates",
                                              slot.binding.name, to_string(slot.binding.level),
                                              slot.errors));
    }
    results.push_back(std::move(r));
  }
  if (missing_spam) {
    outcome.footnotes.push_back("NoSpamEvaluated: no spam reached the filters; FAR shown as 0");
  }
  if (missing_ham) {
    outcome.footnotes.push_back("NoHamEvaluated: no ham reached the filters; FRR shown as 0");
  }
  outcome.ranked = rank(std::move(results));
  report::write_all(out_dir, outcome.ranked, outcome.footnotes);
  {
    std::ofstream notes(out_dir / "notes.txt", std::ios::binary | std::ios::trunc);
    for (const auto& f : outcome.footnotes) notes << f << '\n';
    std::ofstream eff(out_dir / "effective.cfg", std::ios::binary | std::ios::trunc);
    sim.write(eff);
  }
  return outcome;
}

}  // namespace spamlab
