#pragma once

#include <cstdint>
#include <vector>

#include "spamlab/filters.hpp"

namespace spamlab {

inline constexpr double kDefaultEpsilon = 0.01;

/// Confusion counts; the first letter is the truth, the second the verdict.
struct ConfusionCounts {
  std::uint64_t ss = 0;
  std::uint64_t sh = 0;
  std::uint64_t hs = 0;
  std::uint64_t hh = 0;

  std::uint64_t n_spam() const { return ss + sh; }
  std::uint64_t n_ham() const { return hs + hh; }
  std::uint64_t total() const { return ss + sh + hs + hh; }

  void record(Label truth, Label verdict);

  bool operator==(const ConfusionCounts&) const = default;
};

/// False acceptance rate sh / (ss + sh). Throws Error{NoSpamEvaluated}.
double far(const ConfusionCounts& c);
/// False rejection rate hs / (hs + hh). Throws Error{NoHamEvaluated}.
double frr(const ConfusionCounts& c);

/// (frr + eps)^2 * (far + eps): false rejections weigh quadratically.
double wrongness(double far, double frr, double eps = kDefaultEpsilon);

struct FilterResult {
  FilterBinding binding;
  ConfusionCounts counts;
  double far = 0.0;
  double frr = 0.0;
  double wrongness = 0.0;
  std::uint64_t wrapper_errors = 0;
  bool far_defined = true;
  bool frr_defined = true;
};

/// Fills far/frr/wrongness from counts. An undefined rate is reported as 0
/// and flagged.
FilterResult make_result(FilterBinding binding, const ConfusionCounts& counts,
                         std::uint64_t wrapper_errors = 0, double eps = kDefaultEpsilon);

/// Ascending wrongness; ties by name, then level.
std::vector<FilterResult> rank(std::vector<FilterResult> results);

}  // namespace spamlab
