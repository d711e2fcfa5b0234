#include <cmath>

#include <fmt/format.h>

#include "spamlab/errors.hpp"
#include "spamlab/trafficgen.hpp"

namespace spamlab {

SimConfig calibrate_spam_fraction(const SimConfig& config, const CalibrationOptions& opts) {
  config.validate();
  const double target = config.target_spam_fraction;
  if (config.n_spammers == 0 || config.spam_targets == 0) {
    if (target == 0.0) return config;
    throw Error(ErrorCode::CalibrationFailed,
                fmt::format("target {} needs spammers with targets", target));
  }
  if (target == 0.0) {
    SimConfig silent = config;
    silent.activation_prob = 0.0;
    return silent;
  }

  // Bisect on a multiplier of the configured activation probability. Every
  // pilot reuses the config seed so neighbouring multipliers see the same
  // random draws and the measured fraction moves almost monotonically.
  const double base = config.activation_prob > 0.0 ? config.activation_prob : 1.0;
  auto measure = [&](double multiplier) {
    SimConfig c = config;
    c.activation_prob = std::min(1.0, base * multiplier);
    return std::pair{c, pilot_run(c, opts.pilot_deliveries).spam_fraction()};
  };

  double lo = 0.0;
  double hi = 1.0 / base;
  auto [best, best_fraction] = measure(hi);
  if (best_fraction < target - opts.tolerance) {
    throw Error(ErrorCode::CalibrationFailed,
                fmt::format("spam fraction ceiling {:.4f} is below target {:.4f}", best_fraction,
                            target));
  }
  for (int i = 0; i < opts.max_iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    auto [cfg, fraction] = measure(mid);
    if (std::abs(fraction - target) < std::abs(best_fraction - target)) {
      best = cfg;
      best_fraction = fraction;
    }
    if (std::abs(fraction - target) <= opts.tolerance / 4) break;
    (fraction < target ? lo : hi) = mid;
  }
  if (std::abs(best_fraction - target) > opts.tolerance) {
    throw Error(ErrorCode::CalibrationFailed,
                fmt::format("closest spam fraction {:.4f} misses target {:.4f} by more than {}",
                            best_fraction, target, opts.tolerance));
  }
  return best;
}

}  // namespace spamlab
