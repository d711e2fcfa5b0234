#pragma once

#include <optional>

#include "spamlab/message.hpp"

namespace spamlab {

struct Verdict {
  Label label = Label::Ham;
  std::optional<double> score;

  bool operator==(const Verdict&) const = default;
};

}  // namespace spamlab
