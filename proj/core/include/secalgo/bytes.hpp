#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace secalgo {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Owning byte buffer that is wiped when it goes out of scope. Used for key
/// material.
class SecureBytes {
 public:
  SecureBytes() = default;
  explicit SecureBytes(ByteView data) : data_(data.begin(), data.end()) {}
  explicit SecureBytes(Bytes&& data) : data_(std::move(data)) {}
  SecureBytes(const SecureBytes&) = default;
  SecureBytes(SecureBytes&& other) noexcept;
  SecureBytes& operator=(const SecureBytes& other);
  SecureBytes& operator=(SecureBytes&& other) noexcept;
  ~SecureBytes();

  ByteView view() const noexcept { return data_; }
  const std::uint8_t* data() const noexcept { return data_.data(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  friend bool operator==(const SecureBytes& a, const SecureBytes& b);

 private:
  void wipe() noexcept;

  Bytes data_;
};

Bytes to_bytes(std::string_view s);
std::string to_string(ByteView b);

std::string hex_encode(ByteView b);
/// Throws ParseError on odd length or non-hex characters.
Bytes hex_decode(std::string_view hex);

/// RFC 4648 base64url alphabet, no padding.
std::string base64url_encode(ByteView b);
/// Throws ParseError on characters outside the alphabet or impossible lengths.
Bytes base64url_decode(std::string_view text);

void append(Bytes& out, ByteView tail);
void append_u32_be(Bytes& out, std::uint32_t v);
std::uint32_t read_u32_be(ByteView in);

/// Constant-time comparison; lengths are not secret.
bool equal_ct(ByteView a, ByteView b);

}  // namespace secalgo
