#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "secalgo/bytes.hpp"
#include "secalgo/codec.hpp"
#include "secalgo/config.hpp"
#include "secalgo/keys.hpp"
#include "secalgo/labels.hpp"

namespace secalgo {

enum class Scheme : std::uint8_t {
  shared_aead = 1,
  shared_classic = 2,
  stream = 3,
  public_direct = 4,
  public_hybrid = 5,
};

std::string_view name(Scheme s);

inline constexpr std::uint8_t kEnvelopeVersion = 1;
inline constexpr std::size_t kTagBytes = 16;

/// Versioned ciphertext. Wire layout:
///   version | scheme | algorithm | mode | header
///   | [u32 wrapped length | wrapped key]   (public-hybrid)
///   | body | [16-byte tag]                 (AEAD schemes)
struct CipherEnvelope {
  std::uint8_t version = kEnvelopeVersion;
  Scheme scheme = Scheme::shared_aead;
  Algorithm algorithm = Algorithm::aes;
  Mode mode = Mode::gcm;
  Bytes header;
  Bytes wrapped_key;
  Bytes body;
  Bytes tag;

  Bytes serialize() const;
  /// Throws MalformedEncoding when the bytes do not follow the layout.
  static CipherEnvelope parse(ByteView wire);

  codec::Value to_value() const { return codec::Value(serialize()); }
  static CipherEnvelope from_value(const codec::Value& v) { return parse(v.as_bytes()); }

  friend bool operator==(const CipherEnvelope&, const CipherEnvelope&) = default;
};

/// Header length fixed by (algorithm, mode, scheme).
std::size_t header_size(Scheme s, Algorithm a, Mode m);

struct Signature {
  Algorithm algorithm = Algorithm::hmac;
  Hash hash = Hash::sha256;
  Bytes bytes;

  /// Tuple (algorithm id, hash id, signature bytes).
  codec::Value to_value() const;
  static Signature from_value(const codec::Value& v);

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Combined-mode output: the original text travelling with its signature.
struct SignedPayload {
  codec::Value text;
  Signature signature;

  /// Tuple (text, algorithm id, hash id, signature bytes).
  codec::Value to_value() const;
  static SignedPayload from_value(const codec::Value& v);

  friend bool operator==(const SignedPayload&, const SignedPayload&) = default;
};

using SignOutput = std::variant<Signature, SignedPayload>;
codec::Value to_value(const SignOutput& out);

// Encryption. Shared keys pick the scheme from their algorithm and mode;
// public keys use RSA-OAEP directly when the plaintext fits and AES-256-GCM
// under an OAEP-wrapped key otherwise. Every call draws a fresh IV, nonce or
// counter prefix.

CipherEnvelope encrypt(const codec::Value& text, const KeyEnvelope& key);
/// Pre-encoded plaintext; bypasses the codec.
CipherEnvelope encrypt_raw(ByteView plaintext, const KeyEnvelope& key);

/// Throws DecryptionFailure for every failure of the ciphertext itself,
/// MisuseError / WrongKeyPart for an unusable key.
codec::Value decrypt(const CipherEnvelope& env, const KeyEnvelope& key);
/// Envelope carried as a bytes value, as in protocol messages.
codec::Value decrypt(const codec::Value& env, const KeyEnvelope& key);
Bytes decrypt_raw(const CipherEnvelope& env, const KeyEnvelope& key);

// Signing. Secret keys produce HMACs, private keys public-key signatures.
// The key's sign_mode decides between a detached Signature and a combined
// SignedPayload.

SignOutput sign(const codec::Value& text, const KeyEnvelope& key);
SignOutput sign_raw(ByteView text, const KeyEnvelope& key);
/// Keyless signing is a digest of the encoded text under the scope's
/// sign_hash.
Bytes sign(const codec::Value& text, const config::Scope& scope = config::global_scope());

bool verify(const codec::Value& text, const Signature& sig, const KeyEnvelope& key);
bool verify_raw(ByteView text, const Signature& sig, const KeyEnvelope& key);
/// The embedded text when the signature verifies, nullopt otherwise.
std::optional<codec::Value> verify(const SignedPayload& signed_text, const KeyEnvelope& key);
/// Raw combined form; the text slot must hold bytes.
std::optional<Bytes> verify_raw(const SignedPayload& signed_text, const KeyEnvelope& key);

// PKCS#7 padding.

/// Appends N bytes of value N, N = block_size - (len % block_size).
Bytes pad_pkcs7(ByteView data, std::size_t block_size);
/// nullopt on any padding error.
std::optional<Bytes> unpad_pkcs7(ByteView data, std::size_t block_size);

}  // namespace secalgo
