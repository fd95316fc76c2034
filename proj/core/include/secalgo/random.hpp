#pragma once

#include <cstdint>

#include "secalgo/bytes.hpp"

namespace secalgo {

/// Cryptographically strong random bytes from the current provider.
Bytes random_bytes(std::size_t n);
std::uint64_t random_u64();

/// Routes every random draw in the process, including ones made inside the
/// backend, through a deterministic stream for the lifetime of the object.
/// For reproducible tests and protocol traces only. Not reentrant.
class SeededRandom {
 public:
  explicit SeededRandom(std::uint64_t seed);
  ~SeededRandom();
  SeededRandom(const SeededRandom&) = delete;
  SeededRandom& operator=(const SeededRandom&) = delete;
};

}  // namespace secalgo
