#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spamlab/filters.hpp"
#include "spamlab/kvconfig.hpp"
#include "spamlab/metrics.hpp"
#include "spamlab/trafficgen.hpp"

namespace spamlab {

struct Scenario {
  std::string name = "scenario";
  bool personalized = false;
  std::filesystem::path spam_corpus;
  std::vector<std::filesystem::path> ham_corpora;  // one topic per entry
  Level level = Level::User;
  SimConfig sim;
  std::vector<FilterBinding> filters;
  std::uint64_t training_steps = 2000;
  std::uint64_t eval_steps = 10000;
  FilterParams params;
  double epsilon = kDefaultEpsilon;
  bool calibrate = false;

  // Throws Error{ConfigInvalid}.
  void validate() const;

  /// Filter lines without an explicit level inherit `level`.
  static Scenario from_config(const KeyValueConfig& kv);
  static Scenario load(const std::filesystem::path& path);
};

struct ScenarioOutcome {
  std::vector<FilterResult> ranked;
  std::vector<std::string> footnotes;
  std::uint64_t training_messages = 0;
  std::uint64_t eval_messages = 0;
  std::uint64_t eval_spam_messages = 0;
  SimConfig effective_sim;
};

/// Trains on `training_steps` of generated traffic, evaluates every filter
/// on the following `eval_steps`, and writes the reports plus the
/// connection log and training mboxes under `out_dir`.
/// Throws Error{ConfigInvalid} or Error{CorpusMissing}.
ScenarioOutcome run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

}  // namespace spamlab
