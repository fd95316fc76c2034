#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "secalgo/bytes.hpp"

namespace secalgo::codec {

inline constexpr std::size_t kMaxDepth = 32;

enum class Tag : std::uint8_t {
  bytes = 0x01,
  string = 0x02,
  integer = 0x03,
  boolean = 0x04,
  tuple = 0x05,
};

class Value;
using Tuple = std::vector<Value>;

/// Structured plaintext: byte string, UTF-8 string, signed 64-bit integer,
/// boolean, or an ordered tuple of values.
class Value {
 public:
  using Storage = std::variant<Bytes, std::string, std::int64_t, bool, Tuple>;

  Value() : v_(Tuple{}) {}
  Value(Bytes b) : v_(std::move(b)) {}
  Value(ByteView b) : v_(Bytes(b.begin(), b.end())) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(std::string_view s) : v_(std::string(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(bool b) : v_(b) {}
  Value(Tuple t) : v_(std::move(t)) {}

  Tag tag() const;

  bool is_bytes() const { return std::holds_alternative<Bytes>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_tuple() const { return std::holds_alternative<Tuple>(v_); }

  // Typed access; throws MalformedEncoding on a type mismatch so that
  // protocol code can treat unexpected shapes as malformed input.
  const Bytes& as_bytes() const;
  const std::string& as_string() const;
  std::int64_t as_int() const;
  bool as_bool() const;
  const Tuple& as_tuple() const;
  /// Tuple access that also checks the arity.
  const Tuple& as_tuple(std::size_t arity) const;

  const Storage& storage() const { return v_; }

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }

 private:
  Storage v_;
};

/// Tag-length-value encoding: tag byte, 4-byte big-endian length (element
/// count for tuples), payload. Integers are 8-byte big-endian two's
/// complement. Throws UnsupportedType for strings that are not UTF-8 and
/// DepthExceeded past kMaxDepth nested tuples.
Bytes encode(const Value& v);
void encode_into(const Value& v, Bytes& out);

/// Inverse of encode. Rejects unknown tags, short payloads, non-canonical
/// payloads and trailing bytes with MalformedEncoding.
Value decode(ByteView in);

std::string debug_string(const Value& v);

}  // namespace secalgo::codec
