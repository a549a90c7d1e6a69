#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vegopt {

using Rng = std::mt19937_64;

// Derives an independent per-task seed from the run seed, a stage tag and an
// index (product, replica, individual). Stable across runs and platforms.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t base, std::string_view tag, std::uint64_t index = 0) {
  return Rng(derive_seed(base, tag, index));
}

}  // namespace vegopt
