#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "spamlab/message.hpp"

namespace spamlab::mbox {

bool looks_like_mbox(std::string_view text);

// Splits at lines beginning "From " and undoes ">From " quoting. The
// separator line itself is not part of the entry.
std::vector<std::string> split(std::string_view text);

void append_entry(std::ostream& out, const Message& m);

std::vector<Message> read_messages(const std::filesystem::path& path);
void write_messages(const std::filesystem::path& path, const std::vector<Message>& messages);

}  // namespace spamlab::mbox
