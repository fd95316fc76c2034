#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "secalgo/secalgo.hpp"

// Hand-rolled generators for property tests. Every property runs from a
// fixed seed so that failures reproduce.
namespace testsupport {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t u64() { return rng_(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool coin() { return rng_() & 1; }

  secalgo::Bytes bytes(std::size_t max_len) {
    secalgo::Bytes b(below(max_len + 1));
    for (auto& x : b) x = static_cast<std::uint8_t>(rng_());
    return b;
  }

  // Valid UTF-8 drawn from 1- to 4-byte code points, surrogates excluded.
  std::string utf8(std::size_t max_chars) {
    std::string s;
    const std::size_t n = below(max_chars + 1);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t cp;
      switch (below(4)) {
        case 0: cp = static_cast<std::uint32_t>(below(0x80)); break;
        case 1: cp = 0x80 + static_cast<std::uint32_t>(below(0x800 - 0x80)); break;
        case 2:
          do cp = 0x800 + static_cast<std::uint32_t>(below(0x10000 - 0x800));
          while (cp >= 0xD800 && cp <= 0xDFFF);
          break;
        default: cp = 0x10000 + static_cast<std::uint32_t>(below(0x110000 - 0x10000)); break;
      }
      append_utf8(s, cp);
    }
    return s;
  }

  std::int64_t integer() {
    switch (below(4)) {
      case 0: return static_cast<std::int64_t>(below(256)) - 128;
      case 1: return std::numeric_limits<std::int64_t>::min() + static_cast<std::int64_t>(below(3));
      case 2: return std::numeric_limits<std::int64_t>::max() - static_cast<std::int64_t>(below(3));
      default: return static_cast<std::int64_t>(rng_());
    }
  }

  secalgo::codec::Value value(int depth = 4) {
    switch (below(depth > 0 ? 5 : 4)) {
      case 0: return secalgo::codec::Value(bytes(48));
      case 1: return secalgo::codec::Value(utf8(24));
      case 2: return secalgo::codec::Value(integer());
      case 3: return secalgo::codec::Value(coin());
      default: {
        secalgo::codec::Tuple t;
        const std::size_t n = below(5);
        for (std::size_t i = 0; i < n; ++i) t.push_back(value(depth - 1));
        return secalgo::codec::Value(std::move(t));
      }
    }
  }

  static void append_utf8(std::string& s, std::uint32_t cp) {
    if (cp < 0x80) {
      s += static_cast<char>(cp);
    } else if (cp < 0x800) {
      s += static_cast<char>(0xC0 | (cp >> 6));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      s += static_cast<char>(0xE0 | (cp >> 12));
      s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      s += static_cast<char>(0xF0 | (cp >> 18));
      s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

 private:
  std::mt19937_64 rng_;
};

inline secalgo::Bytes hex(std::string_view h) { return secalgo::hex_decode(h); }

}  // namespace testsupport
