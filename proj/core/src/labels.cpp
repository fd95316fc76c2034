#include "secalgo/labels.hpp"

#include <array>
#include <cctype>
#include <utility>

#include "secalgo/error.hpp"

namespace secalgo {

namespace {

template <class E, std::size_t N>
using Table = std::array<std::pair<E, std::string_view>, N>;

constexpr Table<Algorithm, 10> kAlgorithms{{
    {Algorithm::aes, "AES"},
    {Algorithm::blowfish, "Blowfish"},
    {Algorithm::triple_des, "3DES"},
    {Algorithm::salsa20, "Salsa20"},
    {Algorithm::chacha20, "ChaCha20"},
    {Algorithm::hmac, "HMAC"},
    {Algorithm::rsa, "RSA"},
    {Algorithm::dsa, "DSA"},
    {Algorithm::ecdsa, "ECDSA"},
    {Algorithm::dh, "DH"},
}};

constexpr Table<Mode, 10> kModes{{
    {Mode::none, "none"},
    {Mode::cbc, "CBC"},
    {Mode::ctr, "CTR"},
    {Mode::cfb, "CFB"},
    {Mode::eax, "EAX"},
    {Mode::gcm, "GCM"},
    {Mode::ccm, "CCM"},
    {Mode::siv, "SIV"},
    {Mode::ocb, "OCB"},
    {Mode::oaep, "OAEP"},
}};

constexpr Table<Hash, 4> kHashes{{
    {Hash::sha224, "SHA224"},
    {Hash::sha256, "SHA256"},
    {Hash::sha384, "SHA384"},
    {Hash::sha512, "SHA512"},
}};

constexpr Table<KeyPart, 3> kParts{{
    {KeyPart::secret, "secret"},
    {KeyPart::private_part, "private"},
    {KeyPart::public_part, "public"},
}};

constexpr Table<SignMode, 2> kSignModes{{
    {SignMode::detached, "detached"},
    {SignMode::combined, "combined"},
}};

template <class E, std::size_t N>
std::string_view lookup(const Table<E, N>& t, E e) {
  for (const auto& [k, v] : t)
    if (k == e) return v;
  return "?";
}

template <class E, std::size_t N>
std::optional<E> parse(const Table<E, N>& t, std::string_view s) {
  for (const auto& [k, v] : t)
    if (iequals(v, s)) return k;
  return std::nullopt;
}

template <class E, std::size_t N>
std::optional<E> from_id(const Table<E, N>& t, std::uint8_t id) {
  for (const auto& [k, v] : t)
    if (static_cast<std::uint8_t>(k) == id) return k;
  return std::nullopt;
}

}  // namespace

std::string_view name(Algorithm a) { return lookup(kAlgorithms, a); }
std::string_view name(Mode m) { return lookup(kModes, m); }
std::string_view name(Hash h) { return lookup(kHashes, h); }
std::string_view name(KeyPart p) { return lookup(kParts, p); }
std::string_view name(SignMode m) { return lookup(kSignModes, m); }

std::optional<Algorithm> parse_algorithm(std::string_view s) { return parse(kAlgorithms, s); }
std::optional<Mode> parse_mode(std::string_view s) { return parse(kModes, s); }
std::optional<Hash> parse_hash(std::string_view s) { return parse(kHashes, s); }
std::optional<KeyPart> parse_key_part(std::string_view s) { return parse(kParts, s); }
std::optional<SignMode> parse_sign_mode(std::string_view s) { return parse(kSignModes, s); }

std::optional<Algorithm> algorithm_from_id(std::uint8_t id) { return from_id(kAlgorithms, id); }
std::optional<Mode> mode_from_id(std::uint8_t id) { return from_id(kModes, id); }
std::optional<Hash> hash_from_id(std::uint8_t id) { return from_id(kHashes, id); }

bool is_block_cipher(Algorithm a) {
  return a == Algorithm::aes || a == Algorithm::blowfish || a == Algorithm::triple_des;
}

bool is_stream_cipher(Algorithm a) { return a == Algorithm::salsa20 || a == Algorithm::chacha20; }

bool is_symmetric(Algorithm a) {
  return is_block_cipher(a) || is_stream_cipher(a) || a == Algorithm::hmac;
}

bool is_asymmetric(Algorithm a) { return !is_symmetric(a); }

bool can_sign(Algorithm a) { return a != Algorithm::dh; }

std::size_t block_size(Algorithm a) {
  switch (a) {
    case Algorithm::aes:
      return 16;
    case Algorithm::blowfish:
    case Algorithm::triple_des:
      return 8;
    default:
      return 0;
  }
}

bool is_aead(Mode m) {
  return m == Mode::eax || m == Mode::gcm || m == Mode::ccm || m == Mode::siv || m == Mode::ocb;
}

std::size_t digest_size(Hash h) {
  switch (h) {
    case Hash::sha224:
      return 28;
    case Hash::sha256:
      return 32;
    case Hash::sha384:
      return 48;
    case Hash::sha512:
      return 64;
  }
  return 0;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

std::string_view code(MisuseClass c) {
  switch (c) {
    case MisuseClass::M1K: return "M1K";
    case MisuseClass::M2K: return "M2K";
    case MisuseClass::M1S: return "M1S";
    case MisuseClass::M2S: return "M2S";
    case MisuseClass::M3S: return "M3S";
    case MisuseClass::M1A: return "M1A";
    case MisuseClass::M1H: return "M1H";
  }
  return "?";
}

std::string_view description(MisuseClass c) {
  switch (c) {
    case MisuseClass::M1K: return "Insufficient key size";
    case MisuseClass::M2K: return "Constant or hardcoded keys";
    case MisuseClass::M1S: return "Encryption in ECB mode";
    case MisuseClass::M2S: return "Encryption with predictable IV";
    case MisuseClass::M3S: return "Encryption with obsolete algorithm";
    case MisuseClass::M1A: return "RSA encryption without OAEP";
    case MisuseClass::M1H: return "Hashing with obsolete algorithm";
  }
  return "?";
}

MisuseError::MisuseError(MisuseClass cls, const std::string& detail)
    : Error(std::string(code(cls)) + " (" + std::string(description(cls)) + "): " + detail),
      class_(cls) {}

}  // namespace secalgo
