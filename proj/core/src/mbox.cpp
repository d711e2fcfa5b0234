#include "spamlab/mbox.hpp"

#include <fstream>
#include <sstream>

#include "spamlab/corpus.hpp"
#include "spamlab/errors.hpp"

namespace spamlab::mbox {
namespace {

constexpr std::string_view kSeparatorDate = " Thu Jan  1 00:00:00 1970";

bool is_quoted_from(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && line[i] == '>') ++i;
  return i > 0 && line.substr(i).starts_with("From ");
}

}  // namespace

bool looks_like_mbox(std::string_view text) { return text.starts_with("From "); }

std::vector<std::string> split(std::string_view text) {
  std::vector<std::string> entries;
  bool in_entry = false;
  std::string current;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const bool has_nl = nl != std::string_view::npos;
    std::string_view line = text.substr(0, nl);
    text = has_nl ? text.substr(nl + 1) : std::string_view{};
    if (line.starts_with("From ")) {
      if (in_entry) entries.push_back(std::move(current));
      current.clear();
      in_entry = true;
      continue;
    }
    if (!in_entry) continue;
    if (is_quoted_from(line)) line.remove_prefix(1);
    current.append(line);
    if (has_nl) current += '\n';
  }
  if (in_entry) entries.push_back(std::move(current));
  return entries;
}

void append_entry(std::ostream& out, const Message& m) {
  out << "From " << (m.from_addr.empty() ? "MAILER-DAEMON" : m.from_addr) << kSeparatorDate
      << '\n';
  const std::string text = render_message(m);
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    if (line.starts_with("From ") || is_quoted_from(line)) out << '>';
    out << line;
    if (nl == std::string_view::npos) break;
    out << '\n';
    rest.remove_prefix(nl + 1);
  }
  // The terminating newline plus the blank separator line; read_messages
  // strips exactly these two characters.
  out << "\n\n";
}

std::vector<Message> read_messages(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read mbox " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::vector<Message> out;
  for (auto& entry : split(buf.str())) {
    if (entry.ends_with("\n\n")) entry.resize(entry.size() - 2);
    out.push_back(parse_message(entry));
  }
  return out;
}

void write_messages(const std::filesystem::path& path, const std::vector<Message>& messages) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write mbox " + path.string());
  for (const auto& m : messages) append_entry(out, m);
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace spamlab::mbox
