#include "spamlab/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "spamlab/errors.hpp"

namespace spamlab::report {
namespace {

// Published-table style: no leading zero below one.
std::string rate(double v, int decimals) {
  auto s = fmt::format("{:.{}f}", v, decimals);
  if (s.starts_with("0.")) s.erase(0, 1);
  return s;
}

std::string scaled_wrongness(double w) {
  const double x = w * 1e5;
  if (x < 10.0) return fmt::format("{:.2f}", x);
  if (x < 100.0) return fmt::format("{:.1f}", x);
  return fmt::format("{:.0f}", x);
}

std::string kind_of(const FilterBinding& b) {
  return b.mode == FilterMode::Builtin ? "builtin:" + b.builtin_id : "external";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::string_view kCsvHeader =
    "filter,level,kind,ss,sh,hs,hh,frr,far,wrongness,wrapper_errors,far_defined,frr_defined";

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + p.string());
}

}  // namespace

std::string format_table(const std::vector<FilterResult>& ranked,
                         const std::vector<std::string>& footnotes) {
  std::size_t width = 6;
  for (const auto& r : ranked) width = std::max(width, r.binding.name.size());
  std::string out = fmt::format("{:<{}}  {:<5}  {:>6}  {:>6}  {:>7}\n", "Filter", width, "Level",
                                "FRR", "FAR", "W*10^5");
  for (const auto& r : ranked) {
    std::string marks;
    if (!r.far_defined || !r.frr_defined) marks += " *";
    if (r.wrapper_errors > 0) marks += fmt::format(" ({} wrapper errors)", r.wrapper_errors);
    out += fmt::format("{:<{}}  {:<5}  {:>6}  {:>6}  {:>7}{}\n", r.binding.name, width,
                       to_string(r.binding.level), rate(r.frr, 4), rate(r.far, 3),
                       scaled_wrongness(r.wrongness), marks);
  }
  if (!footnotes.empty()) {
    out += "\n";
    for (const auto& f : footnotes) out += "* " + f + "\n";
  }
  return out;
}

std::string format_csv(const std::vector<FilterResult>& ranked) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : ranked) {
    out += fmt::format("{},{},{},{},{},{},{},{:.17g},{:.17g},{:.17g},{},{},{}\n",
                       csv_field(r.binding.name), to_string(r.binding.level),
                       csv_field(kind_of(r.binding)), r.counts.ss, r.counts.sh, r.counts.hs,
                       r.counts.hh, r.frr, r.far, r.wrongness, r.wrapper_errors,
                       r.far_defined ? 1 : 0, r.frr_defined ? 1 : 0);
  }
  return out;
}

std::vector<FilterResult> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::IoFailure, "results.csv has an unexpected header");
  }
  std::vector<FilterResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv_split(line);
    if (f.size() != 13) throw Error(ErrorCode::IoFailure, "bad results.csv row '" + line + "'");
    try {
      FilterResult r;
      r.binding.name = f[0];
      r.binding.level = parse_level(f[1]);
      if (f[2].starts_with("builtin:")) {
        r.binding.mode = FilterMode::Builtin;
        r.binding.builtin_id = f[2].substr(8);
      } else {
        r.binding.mode = FilterMode::External;
      }
      r.counts = {std::stoull(f[3]), std::stoull(f[4]), std::stoull(f[5]), std::stoull(f[6])};
      r.frr = std::stod(f[7]);
      r.far = std::stod(f[8]);
      r.wrongness = std::stod(f[9]);
      r.wrapper_errors = std::stoull(f[10]);
      r.far_defined = f[11] == "1";
      r.frr_defined = f[12] == "1";
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::IoFailure, "bad results.csv row '" + line + "'");
    }
  }
  return out;
}

std::string format_svg(const std::vector<FilterResult>& ranked) {
  constexpr double kWidth = 640, kHeight = 480;
  constexpr double kLeft = 70, kRight = 170, kTop = 30, kBottom = 60;
  constexpr double kFrrMax = 0.02, kFarMax = 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](double frr) { return kLeft + std::clamp(frr, 0.0, kFrrMax) / kFrrMax * plot_w; };
  auto y_of = [&](double far) { return kTop + (1.0 - std::clamp(far, 0.0, kFarMax) / kFarMax) * plot_h; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"11\">\n",
      kWidth, kHeight, kWidth, kHeight);
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                     kLeft, kTop, plot_w, plot_h);
  for (int i = 0; i <= 4; ++i) {
    const double v = kFrrMax * i / 4;
    const double x = x_of(v);
    out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n",
                       x, kTop + plot_h, x, kTop + plot_h + 5);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x,
                       kTop + plot_h + 18, rate(v, 3));
  }
  for (int i = 0; i <= 5; ++i) {
    const double v = kFarMax * i / 5;
    const double y = y_of(v);
    out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n",
                       kLeft - 5, y, kLeft, y);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 8,
                       y + 4, rate(v, 1));
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">FRR</text>\n",
                     kLeft + plot_w / 2, kHeight - 20);
  out += fmt::format(
      "<text x=\"20\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2f})\">FAR</text>\n",
      kTop + plot_h / 2, kTop + plot_h / 2);

  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& r = ranked[i];
    const double x = x_of(r.frr);
    const double y = y_of(r.far);
    const auto label = xml_escape(fmt::format("{} ({})", r.binding.name, to_string(r.binding.level)));
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"black\"><title>{}</title></circle>\n",
                       x, y, label);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}. {}</text>\n", x + 6, y - 4, i + 1, label);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}. {}</text>\n", kLeft + plot_w + 12,
                       kTop + 14 * (static_cast<double>(i) + 1), i + 1, label);
  }
  out += "</svg>\n";
  return out;
}

void write_all(const std::filesystem::path& dir, const std::vector<FilterResult>& ranked,
               const std::vector<std::string>& footnotes) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());
  write_file(dir / "results.txt", format_table(ranked, footnotes));
  write_file(dir / "results.csv", format_csv(ranked));
  write_file(dir / "farfrr.svg", format_svg(ranked));
}

}  // namespace spamlab::report
