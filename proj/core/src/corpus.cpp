#include "spamlab/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "spamlab/errors.hpp"
#include "spamlab/mbox.hpp"

namespace spamlab {

std::string_view to_string(Label label) { return label == Label::Spam ? "spam" : "ham"; }

std::vector<std::string> Message::all_recipients() const {
  std::vector<std::string> out;
  out.reserve(recipient_count());
  out.insert(out.end(), to_addrs.begin(), to_addrs.end());
  out.insert(out.end(), cc_addrs.begin(), cc_addrs.end());
  out.insert(out.end(), bcc_addrs.begin(), bcc_addrs.end());
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingPath, "cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool is_header_line(std::string_view line) {
  const auto colon = line.find(':');
  if (colon == 0 || colon == std::string_view::npos) return false;
  return std::all_of(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(colon),
                     [](unsigned char c) { return std::isalnum(c) || c == '-'; });
}

// An mbox entry is usually a full message; corpora only want the body.
std::string entry_body(std::string_view entry) {
  while (!entry.empty() && entry.back() == '\n') entry.remove_suffix(1);
  if (entry.starts_with('\n')) return std::string(entry.substr(1));
  const auto first_nl = entry.find('\n');
  if (!is_header_line(entry.substr(0, first_nl))) return std::string(entry);
  const auto split = entry.find("\n\n");
  if (split == std::string_view::npos) return {};
  return std::string(entry.substr(split + 2));
}

void append_bodies(const std::string& raw, std::vector<std::string>& out) {
  std::string text = sanitize_utf8(raw);
  if (mbox::looks_like_mbox(text)) {
    for (const auto& entry : mbox::split(text)) out.push_back(entry_body(entry));
  } else {
    out.push_back(std::move(text));
  }
}

void append_joined(std::string& out, std::string_view key, const std::vector<std::string>& addrs) {
  if (addrs.empty()) return;
  out += key;
  out += ": ";
  for (std::size_t i = 0; i < addrs.size(); ++i) {
    if (i) out += ", ";
    out += addrs[i];
  }
  out += '\n';
}

std::vector<std::string> split_addresses(std::string_view value) {
  std::vector<std::string> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    auto item = value.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

bool is_token_char(unsigned char c) {
  return std::isalnum(c) || c == '\'' || c == '-' || c == '$' || c >= 0x80;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, std::string topic) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::exists(path, ec)) throw Error(ErrorCode::MissingPath, path.string() + " does not exist");

  Corpus corpus{std::move(topic), {}, path};
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    for (const auto& f : files) append_bodies(read_file(f), corpus.bodies);
  } else {
    append_bodies(read_file(path), corpus.bodies);
  }
  if (corpus.bodies.empty()) {
    throw Error(ErrorCode::EmptyCorpus, path.string() + " yielded no message bodies");
  }
  return corpus;
}

std::string render_message(const Message& m) {
  std::string out;
  out.reserve(m.body.size() + 256);
  for (const auto& r : m.received_headers) {
    out += "Received: ";
    out += r;
    out += '\n';
  }
  out += "From: ";
  out += m.from_addr;
  out += '\n';
  append_joined(out, "To", m.to_addrs);
  append_joined(out, "Cc", m.cc_addrs);
  append_joined(out, "Bcc", m.bcc_addrs);
  out += "Subject: ";
  out += m.subject;
  out += '\n';
  out += "Message-ID: ";
  out += m.message_id;
  out += "\n\n";
  out += m.body;
  return out;
}

Message parse_message(std::string_view text) {
  Message m;
  std::size_t header_end = text.find("\n\n");
  std::string_view headers = text.substr(0, header_end);
  if (header_end != std::string_view::npos) m.body = std::string(text.substr(header_end + 2));

  while (!headers.empty()) {
    const auto nl = headers.find('\n');
    std::string_view line = headers.substr(0, nl);
    headers = nl == std::string_view::npos ? std::string_view{} : headers.substr(nl + 1);
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const auto key = line.substr(0, colon);
    auto value = line.substr(colon + 1);
    if (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    if (key == "Received") {
      m.received_headers.emplace_back(value);
    } else if (key == "From") {
      m.from_addr = std::string(value);
    } else if (key == "To") {
      m.to_addrs = split_addresses(value);
    } else if (key == "Cc") {
      m.cc_addrs = split_addresses(value);
    } else if (key == "Bcc") {
      m.bcc_addrs = split_addresses(value);
    } else if (key == "Subject") {
      m.subject = std::string(value);
    } else if (key == "Message-ID") {
      m.message_id = std::string(value);
    }
  }
  return m;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2 && current.size() <= 40) out.push_back(current);
    current.clear();
  };
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      current += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::string sanitize_utf8(std::string_view raw) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  const std::size_t n = raw.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(raw[i]);
    std::size_t len = 0;
    std::uint32_t min_cp = 0;
    if (c < 0x80) {
      out += static_cast<char>(c);
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      min_cp = 0x80;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      min_cp = 0x800;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      min_cp = 0x10000;
    }
    bool ok = len != 0 && i + len <= n;
    std::uint32_t cp = len ? (c & (0x7F >> len)) : 0;
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(raw[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (cc & 0x3F);
      }
    }
    ok = ok && cp >= min_cp && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    if (ok) {
      out.append(raw.substr(i, len));
      i += len;
    } else {
      out += kReplacement;
      ++i;
    }
  }
  return out;
}

}  // namespace spamlab
