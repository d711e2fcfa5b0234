#include "spamlab/filters.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <system_error>

#include "spamlab/errors.hpp"
#include "spamlab/mbox.hpp"
#include "spamlab/subprocess.hpp"

namespace spamlab {
namespace {

constexpr std::string_view kBuiltinIds[] = {"pass-all", "block-all", "bayes",
                                            "volume",   "checksum",  "checksum-fuzzy"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

class ConstantFilter final : public Filter {
 public:
  explicit ConstantFilter(Label label) : label_(label) {}
  Verdict classify(const Message&, const ClassifyContext&) override { return {label_, std::nullopt}; }

 private:
  Label label_;
};

class VolumeFilter final : public Filter {
 public:
  explicit VolumeFilter(const FilterParams& p)
      : window_(p.volume_window, p.volume_threshold, p.volume_weight) {}

  Verdict classify(const Message& m, const ClassifyContext& ctx) override {
    if (ctx.log_entry) return bulk::volume_classify(window_, *ctx.log_entry);
    return bulk::volume_classify(window_, m);
  }

 private:
  bulk::VolumeWindow window_;
};

class ChecksumFilter final : public Filter {
 public:
  ChecksumFilter(const FilterParams& p, bool fuzzy) : db_(p.bulk_threshold), fuzzy_(fuzzy) {}

  Verdict classify(const Message& m, const ClassifyContext&) override {
    return bulk::checksum_classify(db_, m, fuzzy_);
  }

 private:
  bulk::ChecksumDB db_;
  bool fuzzy_;
};

void group_by_recipient(const std::vector<Message>& stream,
                        std::map<std::string, std::pair<std::vector<Message>, std::vector<Message>>>& out) {
  for (const auto& m : stream) {
    for (const auto& r : m.all_recipients()) {
      auto& [ham, spam] = out[r];
      (m.truth == Label::Spam ? spam : ham).push_back(m);
    }
  }
}

}  // namespace

std::string_view to_string(Level level) { return level == Level::User ? "U" : "S"; }

Level parse_level(std::string_view text) {
  const auto t = lower(trim(text));
  if (t == "u" || t == "user") return Level::User;
  if (t == "s" || t == "server") return Level::Server;
  throw Error(ErrorCode::ConfigInvalid, "unknown level '" + std::string(text) + "'");
}

void FilterBinding::validate() const {
  if (name.empty()) throw Error(ErrorCode::ConfigInvalid, "filter without a name");
  if (mode == FilterMode::Builtin) {
    if (std::find(std::begin(kBuiltinIds), std::end(kBuiltinIds), builtin_id) == std::end(kBuiltinIds)) {
      throw Error(ErrorCode::ConfigInvalid, "unknown builtin filter '" + builtin_id + "'");
    }
  } else if (command.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "external filter '" + name + "' has no command");
  }
  if (needs_connection_log && level != Level::Server) {
    throw Error(ErrorCode::ConfigInvalid,
                "filter '" + name + "' reads the connection log and must run at server level");
  }
}

FilterBinding FilterBinding::builtin(std::string name, Level level, std::string id) {
  FilterBinding b;
  b.name = std::move(name);
  b.level = level;
  b.mode = FilterMode::Builtin;
  b.needs_training = id == "bayes";
  b.needs_connection_log = id == "volume";
  b.builtin_id = std::move(id);
  return b;
}

FilterBinding FilterBinding::external(std::string name, Level level, std::string command,
                                      std::string trainer_command, bool needs_connection_log) {
  FilterBinding b;
  b.name = std::move(name);
  b.level = level;
  b.mode = FilterMode::External;
  b.command = std::move(command);
  b.needs_training = !trainer_command.empty();
  b.trainer_command = std::move(trainer_command);
  b.needs_connection_log = needs_connection_log;
  return b;
}

FilterBinding FilterBinding::parse(std::string_view spec, Level default_level) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto bar = spec.find('|');
    fields.push_back(trim(spec.substr(0, bar)));
    if (bar == std::string_view::npos) break;
    spec.remove_prefix(bar + 1);
  }
  if (fields.size() < 2 || fields[0].empty()) {
    throw Error(ErrorCode::ConfigInvalid, "filter line needs 'name | [level |] kind'");
  }
  Level level = default_level;
  std::optional<std::string> builtin_id, command;
  std::string trainer;
  bool connlog = false;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto f = fields[i];
    if (f.starts_with("builtin:")) {
      builtin_id = std::string(trim(f.substr(8)));
    } else if (f.starts_with("external:")) {
      command = std::string(trim(f.substr(9)));
    } else if (f.starts_with("trainer:")) {
      trainer = std::string(trim(f.substr(8)));
    } else if (f == "connlog") {
      connlog = true;
    } else {
      level = parse_level(f);
    }
  }
  if (builtin_id.has_value() == command.has_value()) {
    throw Error(ErrorCode::ConfigInvalid,
                "filter '" + std::string(fields[0]) + "' needs exactly one of builtin: or external:");
  }
  auto b = builtin_id ? builtin(std::string(fields[0]), level, *builtin_id)
                      : external(std::string(fields[0]), level, *command, trainer, connlog);
  b.validate();
  return b;
}

TrainingSets emit_training_sets(const std::vector<Message>& stream, bool per_user,
                                const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

  TrainingSets sets{out_dir / "ham.mbox", out_dir / "spam.mbox", {}};
  std::vector<Message> ham, spam;
  for (const auto& m : stream) (m.truth == Label::Spam ? spam : ham).push_back(m);
  mbox::write_messages(sets.ham, ham);
  mbox::write_messages(sets.spam, spam);

  if (per_user) {
    const auto users = out_dir / "users";
    fs::create_directories(users, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + users.string() + ": " + ec.message());
    std::map<std::string, std::pair<std::vector<Message>, std::vector<Message>>> grouped;
    group_by_recipient(stream, grouped);
    for (const auto& [addr, pair] : grouped) {
      auto paths = std::pair{users / (addr + ".ham.mbox"), users / (addr + ".spam.mbox")};
      mbox::write_messages(paths.first, pair.first);
      mbox::write_messages(paths.second, pair.second);
      sets.per_user.emplace(addr, std::move(paths));
    }
  }
  return sets;
}

void Filter::train(const TrainingSets&) {}

std::optional<Verdict> parse_wrapper_output(std::string_view out) {
  const auto line = trim(out.substr(0, out.find('\n')));
  const auto space = line.find_first_of(" \t");
  const auto label = lower(line.substr(0, space));
  Verdict v;
  if (label == "spam") {
    v.label = Label::Spam;
  } else if (label == "ham") {
    v.label = Label::Ham;
  } else {
    return std::nullopt;
  }
  if (space == std::string_view::npos) return v;
  const auto score_text = trim(line.substr(space));
  double score = 0.0;
  const auto* end = score_text.data() + score_text.size();
  auto [ptr, ec] = std::from_chars(score_text.data(), end, score);
  if (ec != std::errc{} || ptr != end || score < 0.0 || score > 1.0) return std::nullopt;
  v.score = score;
  return v;
}

void BayesFilter::train(const TrainingSets& sets) {
  try {
    general_ = bayes::train(sets.ham, sets.spam, opts_);
  } catch (const Error& e) {
    throw Error(ErrorCode::TrainerFailed, e.what());
  }
  per_user_.clear();
  if (level_ != Level::User) return;
  for (const auto& [addr, paths] : sets.per_user) {
    try {
      per_user_.emplace(addr, bayes::train(paths.first, paths.second, opts_));
    } catch (const Error& e) {
      // A mailbox that never saw both classes falls back to the general model.
      if (e.code() != ErrorCode::EmptyTrainingSet) throw Error(ErrorCode::TrainerFailed, e.what());
    }
  }
}

const bayes::Model* BayesFilter::model_for(const std::string& recipient) const {
  if (auto it = per_user_.find(recipient); it != per_user_.end()) return &it->second;
  return general_ ? &*general_ : nullptr;
}

Verdict BayesFilter::classify(const Message& m, const ClassifyContext& ctx) {
  const auto* model = level_ == Level::User ? model_for(ctx.recipient) : general_model();
  if (!model) throw Error(ErrorCode::TrainerFailed, "Bayes filter used before training");
  return bayes::classify(*model, m);
}

void ExternalFilter::train(const TrainingSets& sets) {
  if (binding_.trainer_command.empty()) return;
  for (const auto& p : {sets.ham, sets.spam}) {
    if (!std::filesystem::exists(p)) {
      throw Error(ErrorCode::TrainerFailed, "training file " + p.string() + " is missing");
    }
  }
  ProcessResult r;
  try {
    r = run_shell(binding_.trainer_command, {sets.ham.string(), sets.spam.string()}, {});
  } catch (const std::system_error& e) {
    throw Error(ErrorCode::TrainerFailed, binding_.name + ": " + e.what());
  }
  if (r.exit_code != 0) {
    throw Error(ErrorCode::TrainerFailed,
                binding_.name + ": trainer exited with status " + std::to_string(r.exit_code));
  }
  trained_ = true;
}

Verdict ExternalFilter::classify(const Message& m, const ClassifyContext& ctx) {
  std::vector<std::pair<std::string, std::string>> env;
  if (binding_.needs_connection_log) {
    if (!ctx.connlog_path) {
      throw Error(ErrorCode::ConfigInvalid, binding_.name + ": connection log not provided");
    }
    env.emplace_back(std::string(kConnLogEnv), ctx.connlog_path->string());
  }
  ProcessResult r;
  try {
    r = run_shell(binding_.command, {}, render_message(m), env);
  } catch (const std::system_error& e) {
    throw Error(ErrorCode::WrapperCrashed, binding_.name + ": " + e.what());
  }
  if (r.exit_code != 0) {
    throw Error(ErrorCode::WrapperCrashed,
                binding_.name + ": exited with status " + std::to_string(r.exit_code));
  }
  auto v = parse_wrapper_output(r.stdout_text);
  if (!v) {
    throw Error(ErrorCode::WrapperCrashed,
                binding_.name + ": malformed answer '" + r.stdout_text.substr(0, 80) + "'");
  }
  return *v;
}

std::unique_ptr<Filter> make_filter(const FilterBinding& binding, const FilterParams& params) {
  binding.validate();
  if (binding.mode == FilterMode::External) return std::make_unique<ExternalFilter>(binding);
  const auto& id = binding.builtin_id;
  if (id == "pass-all") return std::make_unique<ConstantFilter>(Label::Ham);
  if (id == "block-all") return std::make_unique<ConstantFilter>(Label::Spam);
  if (id == "bayes") return std::make_unique<BayesFilter>(binding.level, params.bayes);
  if (id == "volume") return std::make_unique<VolumeFilter>(params);
  if (id == "checksum") return std::make_unique<ChecksumFilter>(params, false);
  return std::make_unique<ChecksumFilter>(params, true);
}

}  // namespace spamlab
