// spamlab: simulate mail traffic and score spam filters on it.
//
//   spamlab run <scenario.cfg> [--out DIR]
//   spamlab calibrate <scenario.cfg> [--pilot N]
//   spamlab report <run-dir>
//   spamlab synth-corpus <dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "spamlab/errors.hpp"
#include "spamlab/report.hpp"
#include "spamlab/scenario.hpp"
#include "spamlab/synth.hpp"
#include "spamlab/trafficgen.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw spamlab::Error(spamlab::ErrorCode::MissingPath, "cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

int cmd_run(const fs::path& cfg, fs::path out) {
  const auto scenario = spamlab::Scenario::load(cfg);
  if (out.empty()) out = fs::path("runs") / scenario.name;
  const auto outcome = spamlab::run_scenario(scenario, out);
  std::cout << spamlab::report::format_table(outcome.ranked, outcome.footnotes);
  std::cout << fmt::format("\n{} training messages, {} evaluated ({} spam); reports in {}\n",
                           outcome.training_messages, outcome.eval_messages,
                           outcome.eval_spam_messages, out.string());
  return 0;
}

int cmd_calibrate(const fs::path& cfg, std::uint64_t pilot) {
  const auto scenario = spamlab::Scenario::load(cfg);
  spamlab::CalibrationOptions opts;
  opts.pilot_deliveries = pilot;
  const auto calibrated = spamlab::calibrate_spam_fraction(scenario.sim, opts);
  const auto tally = spamlab::pilot_run(calibrated, pilot);
  std::cout << fmt::format("# target spam fraction {:.4f}, pilot measured {:.4f} over {} deliveries\n",
                           calibrated.target_spam_fraction, tally.spam_fraction(),
                           tally.spam_deliveries + tally.ham_deliveries);
  calibrated.write(std::cout);
  return 0;
}

int cmd_report(const fs::path& dir) {
  auto results = spamlab::report::parse_csv(slurp(dir / "results.csv"));
  const auto ranked = spamlab::rank(std::move(results));
  const auto notes = read_lines(dir / "notes.txt");
  spamlab::report::write_all(dir, ranked, notes);
  std::cout << spamlab::report::format_table(ranked, notes);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mail traffic simulator and spam filter benchmark"};
  app.require_subcommand(1);

  fs::path run_cfg, run_out;
  auto* run = app.add_subcommand("run", "Run a scenario and write ranked reports");
  run->add_option("scenario", run_cfg, "Scenario config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out,-o", run_out, "Output directory (default runs/<name>)");

  fs::path cal_cfg;
  std::uint64_t pilot = 100'000;
  auto* cal = app.add_subcommand("calibrate", "Fit spammer activation to the target spam fraction");
  cal->add_option("scenario", cal_cfg, "Scenario config file")->required()->check(CLI::ExistingFile);
  cal->add_option("--pilot", pilot, "Deliveries per pilot run")->check(CLI::PositiveNumber);

  fs::path report_dir;
  auto* rep = app.add_subcommand("report", "Re-render reports from a run directory");
  rep->add_option("run-dir", report_dir, "Directory written by 'run'")->required()->check(CLI::ExistingDirectory);

  fs::path synth_dir;
  spamlab::synth::CorpusSpec synth;
  auto* syn = app.add_subcommand("synth-corpus", "Write a synthetic ham/spam corpus");
  syn->add_option("dir", synth_dir, "Destination directory")->required();
  syn->add_option("--ham-per-topic", synth.ham_per_topic, "Bodies per ham topic");
  syn->add_option("--spam", synth.spam_count, "Spam bodies");
  syn->add_option("--overlap", synth.spam_ham_overlap, "Share of spam words taken from ham topics")
      ->check(CLI::Range(0.0, 0.8));
  syn->add_option("--seed", synth.seed, "Generator seed");
  syn->add_flag("--mbox", synth.mbox, "Write one mbox per topic instead of one file per body");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_cfg, run_out);
    if (*cal) return cmd_calibrate(cal_cfg, pilot);
    if (*rep) return cmd_report(report_dir);
    if (*syn) {
      spamlab::synth::write_sample_corpora(synth_dir, synth);
      std::cout << "wrote " << synth_dir.string() << "\n";
      return 0;
    }
  } catch (const spamlab::Error& e) {
    std::cerr << "spamlab: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
