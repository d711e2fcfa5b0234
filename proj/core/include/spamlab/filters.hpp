#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spamlab/bayes.hpp"
#include "spamlab/bulk.hpp"
#include "spamlab/message.hpp"
#include "spamlab/trafficgen.hpp"
#include "spamlab/verdict.hpp"

namespace spamlab {

enum class Level { User, Server };

std::string_view to_string(Level level);
Level parse_level(std::string_view text);

enum class FilterMode { Builtin, External };

inline constexpr std::string_view kConnLogEnv = "SPAMLAB_CONNLOG";

/// How one filter under test is deployed.
struct FilterBinding {
  std::string name;
  Level level = Level::User;
  FilterMode mode = FilterMode::Builtin;
  std::string builtin_id;       // Builtin: pass-all, block-all, bayes, volume, checksum, checksum-fuzzy
  std::string command;          // External: shell command of the classifier
  std::string trainer_command;  // External: optional trainer
  bool needs_training = false;
  bool needs_connection_log = false;

  // Throws Error{ConfigInvalid}.
  void validate() const;

  static FilterBinding builtin(std::string name, Level level, std::string id);
  static FilterBinding external(std::string name, Level level, std::string command,
                                std::string trainer_command = {}, bool needs_connection_log = false);

  /// "name | U|S | builtin:<id>" or
  /// "name | U|S | external:<command> [| trainer:<command>] [| connlog]"
  static FilterBinding parse(std::string_view spec, Level default_level = Level::User);
};

/// Parameters of the built-in filters.
struct FilterParams {
  bayes::TrainOptions bayes;
  std::size_t volume_window = 1500;
  std::uint64_t volume_threshold = 100;
  bulk::VolumeWeight volume_weight = bulk::VolumeWeight::Messages;
  std::uint64_t bulk_threshold = 5;
};

/// Per-classification inputs that depend on deployment level. At user level
/// `recipient` names the mailbox the copy is delivered to; at server level
/// `log_entry` and `connlog_path` describe the connection that carried it.
struct ClassifyContext {
  std::string recipient;
  const ConnectionLogEntry* log_entry = nullptr;
  std::optional<std::filesystem::path> connlog_path;
};

/// Mbox files produced by emit_training_sets.
struct TrainingSets {
  std::filesystem::path ham;
  std::filesystem::path spam;
  // recipient address -> (ham, spam); empty unless per-user sets were emitted.
  std::map<std::string, std::pair<std::filesystem::path, std::filesystem::path>> per_user;
};

/// Writes ham.mbox and spam.mbox into out_dir, and when `per_user` is set
/// also users/<address>.{ham,spam}.mbox for every recipient seen.
/// Throws Error{IoFailure}.
TrainingSets emit_training_sets(const std::vector<Message>& stream, bool per_user,
                                const std::filesystem::path& out_dir);

class Filter {
 public:
  virtual ~Filter() = default;

  /// Throws Error{TrainerFailed}.
  virtual void train(const TrainingSets& sets);
  /// Throws Error{WrapperCrashed} for external filters.
  virtual Verdict classify(const Message& m, const ClassifyContext& ctx) = 0;
};

std::unique_ptr<Filter> make_filter(const FilterBinding& binding, const FilterParams& params = {});

/// The wrapper's answer line: "spam" or "ham", any case, optionally
/// followed by a score in [0, 1].
std::optional<Verdict> parse_wrapper_output(std::string_view out);

/// Built-in Bayes filter: one general model, plus per-recipient models
/// when trained at user level.
class BayesFilter final : public Filter {
 public:
  BayesFilter(Level level, bayes::TrainOptions opts) : level_(level), opts_(opts) {}

  void train(const TrainingSets& sets) override;
  Verdict classify(const Message& m, const ClassifyContext& ctx) override;

  const bayes::Model* general_model() const { return general_ ? &*general_ : nullptr; }
  const bayes::Model* model_for(const std::string& recipient) const;

 private:
  Level level_;
  bayes::TrainOptions opts_;
  std::optional<bayes::Model> general_;
  std::map<std::string, bayes::Model> per_user_;
};

class ExternalFilter final : public Filter {
 public:
  explicit ExternalFilter(FilterBinding binding) : binding_(std::move(binding)) {}

  void train(const TrainingSets& sets) override;
  Verdict classify(const Message& m, const ClassifyContext& ctx) override;

  bool trained() const { return trained_; }

 private:
  FilterBinding binding_;
  bool trained_ = false;
};

}  // namespace spamlab
