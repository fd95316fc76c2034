#include "secalgo/random.hpp"

#include <cstring>

#include "secalgo/provider.hpp"

namespace secalgo {

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  provider::current().random(out);
  return out;
}

std::uint64_t random_u64() {
  std::uint8_t b[8];
  provider::current().random(b);
  std::uint64_t v;
  std::memcpy(&v, b, sizeof v);
  return v;
}

SeededRandom::SeededRandom(std::uint64_t seed) { provider::current().set_test_seed(seed); }

SeededRandom::~SeededRandom() { provider::current().set_test_seed(std::nullopt); }

}  // namespace secalgo
