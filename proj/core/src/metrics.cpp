#include "spamlab/metrics.hpp"

#include <algorithm>
#include <tuple>

#include "spamlab/errors.hpp"

namespace spamlab {

void ConfusionCounts::record(Label truth, Label verdict) {
  if (truth == Label::Spam) {
    ++(verdict == Label::Spam ? ss : sh);
  } else {
    ++(verdict == Label::Spam ? hs : hh);
  }
}

double far(const ConfusionCounts& c) {
  if (c.n_spam() == 0) throw Error(ErrorCode::NoSpamEvaluated, "FAR undefined without spam");
  return static_cast<double>(c.sh) / static_cast<double>(c.n_spam());
}

double frr(const ConfusionCounts& c) {
  if (c.n_ham() == 0) throw Error(ErrorCode::NoHamEvaluated, "FRR undefined without ham");
  return static_cast<double>(c.hs) / static_cast<double>(c.n_ham());
}

double wrongness(double far, double frr, double eps) {
  const double r = frr + eps;
  return r * r * (far + eps);
}

FilterResult make_result(FilterBinding binding, const ConfusionCounts& counts,
                         std::uint64_t wrapper_errors, double eps) {
  FilterResult r;
  r.binding = std::move(binding);
  r.counts = counts;
  r.wrapper_errors = wrapper_errors;
  r.far_defined = counts.n_spam() > 0;
  r.frr_defined = counts.n_ham() > 0;
  r.far = r.far_defined ? far(counts) : 0.0;
  r.frr = r.frr_defined ? frr(counts) : 0.0;
  r.wrongness = wrongness(r.far, r.frr, eps);
  return r;
}

std::vector<FilterResult> rank(std::vector<FilterResult> results) {
  std::stable_sort(results.begin(), results.end(), [](const FilterResult& a, const FilterResult& b) {
    return std::tie(a.wrongness, a.binding.name, a.binding.level) <
           std::tie(b.wrongness, b.binding.name, b.binding.level);
  });
  return results;
}

}  // namespace spamlab
