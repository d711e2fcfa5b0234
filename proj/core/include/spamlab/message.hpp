#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace spamlab {

enum class Label { Spam, Ham };

std::string_view to_string(Label label);

/// One simulated email. `truth` is fixed by the generator and is the
/// ground truth every filter verdict is scored against.
struct Message {
  std::string from_addr;
  std::vector<std::string> to_addrs;
  std::vector<std::string> cc_addrs;
  std::vector<std::string> bcc_addrs;
  std::string subject;
  std::string message_id;
  std::vector<std::string> received_headers;  // bogus entries first
  std::string body;
  Label truth = Label::Ham;
  std::string origin_host;
  std::uint64_t step = 0;

  std::size_t recipient_count() const {
    return to_addrs.size() + cc_addrs.size() + bcc_addrs.size();
  }

  // To, then Cc, then Bcc.
  std::vector<std::string> all_recipients() const;

  bool operator==(const Message&) const = default;
};

}  // namespace spamlab
