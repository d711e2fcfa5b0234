#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spamlab/metrics.hpp"

namespace spamlab::report {

/// Ranked table with the columns Filter, Level, FRR, FAR, W*10^5.
std::string format_table(const std::vector<FilterResult>& ranked,
                         const std::vector<std::string>& footnotes = {});

std::string format_csv(const std::vector<FilterResult>& ranked);
std::vector<FilterResult> parse_csv(const std::string& text);

/// FAR/FRR plane, one labelled point per filter. FRR runs horizontally over
/// [0, 0.02] and FAR vertically over [0, 1]; points outside are pinned to
/// the border.
std::string format_svg(const std::vector<FilterResult>& ranked);

/// results.txt, results.csv and farfrr.svg.
void write_all(const std::filesystem::path& dir, const std::vector<FilterResult>& ranked,
               const std::vector<std::string>& footnotes = {});

}  // namespace spamlab::report
