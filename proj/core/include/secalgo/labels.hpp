#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

// Label vocabulary shared by keys, envelopes and the guard. The numeric values
// are wire identifiers and must not change.

namespace secalgo {

enum class Algorithm : std::uint8_t {
  aes = 1,
  blowfish = 2,
  triple_des = 3,
  salsa20 = 4,
  chacha20 = 5,
  hmac = 6,
  rsa = 7,
  dsa = 8,
  ecdsa = 9,
  dh = 10,
};

enum class Mode : std::uint8_t {
  none = 0,
  cbc = 1,
  ctr = 2,
  cfb = 3,
  eax = 4,
  gcm = 5,
  ccm = 6,
  siv = 7,
  ocb = 8,
  oaep = 9,
};

enum class Hash : std::uint8_t {
  sha224 = 1,
  sha256 = 2,
  sha384 = 3,
  sha512 = 4,
};

enum class KeyPart : std::uint8_t { secret, private_part, public_part };

enum class SignMode : std::uint8_t { detached, combined };

std::string_view name(Algorithm a);
std::string_view name(Mode m);
std::string_view name(Hash h);
std::string_view name(KeyPart p);
std::string_view name(SignMode m);

// Case-insensitive; nullopt for anything outside the vocabulary.
std::optional<Algorithm> parse_algorithm(std::string_view s);
std::optional<Mode> parse_mode(std::string_view s);
std::optional<Hash> parse_hash(std::string_view s);
std::optional<KeyPart> parse_key_part(std::string_view s);
std::optional<SignMode> parse_sign_mode(std::string_view s);

std::optional<Algorithm> algorithm_from_id(std::uint8_t id);
std::optional<Mode> mode_from_id(std::uint8_t id);
std::optional<Hash> hash_from_id(std::uint8_t id);

bool is_block_cipher(Algorithm a);
bool is_stream_cipher(Algorithm a);
/// Shared-key ciphers and MAC keys: the part label is "secret".
bool is_symmetric(Algorithm a);
bool is_asymmetric(Algorithm a);
bool can_sign(Algorithm a);

/// Cipher block size in bytes; 0 for non-block algorithms.
std::size_t block_size(Algorithm a);

bool is_aead(Mode m);

std::size_t digest_size(Hash h);

bool iequals(std::string_view a, std::string_view b);

}  // namespace secalgo
