#pragma once

#include <random>

namespace spamlab {

// All simulation randomness flows through one engine per world so a seed
// fully determines the stream.
using Rng = std::mt19937_64;

}  // namespace spamlab
