#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spamlab/message.hpp"

namespace spamlab {

struct Corpus {
  std::string topic;
  std::vector<std::string> bodies;
  std::filesystem::path source_path;
};

/// Loads one body per regular file of a directory (lexicographic filename
/// order), or one body per entry when `path` is an mbox file. Files that are
/// themselves mbox-formatted contribute one body per entry. Invalid UTF-8 is
/// replaced with U+FFFD.
///
/// Throws Error{MissingPath} if `path` does not exist and Error{EmptyCorpus}
/// if nothing was read.
Corpus load_corpus(const std::filesystem::path& path, std::string topic);

/// Canonical LF-terminated wire form used by the external wrapper and the
/// training mboxes.
std::string render_message(const Message& m);

/// Inverse of render_message for header fields and body. Headers the
/// renderer does not emit are ignored; label, origin host and step are not
/// part of the wire form and keep their defaults.
Message parse_message(std::string_view text);

using Token = std::string;

/// Splits on every character that is not alphanumeric and not one of
/// ' - $, lowercases, and keeps tokens of 2..40 bytes.
std::vector<Token> tokenize(std::string_view text);

std::string sanitize_utf8(std::string_view raw);

}  // namespace spamlab
