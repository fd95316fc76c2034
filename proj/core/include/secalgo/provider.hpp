#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secalgo/bytes.hpp"
#include "secalgo/labels.hpp"

// Backend boundary. Everything above this interface is backend-agnostic; the
// shipped build registers one provider, "openssl", backed by OpenSSL 3 and
// libsodium. Provider calls perform no policy checks of their own.

namespace secalgo::provider {

/// Parsed public-key material held by a key envelope so that the DER is only
/// decoded once.
class AsymmetricKey {
 public:
  virtual ~AsymmetricKey() = default;

  virtual Algorithm algorithm() const = 0;
  virtual bool has_private() const = 0;
  /// Modulus bits as decimal text for RSA/DSA, curve name for ECDSA.
  virtual std::string size() const = 0;
  /// RSA modulus length in bytes (0 for other algorithms).
  virtual std::size_t modulus_bytes() const = 0;
  /// Fixed length of a signature produced with this key.
  virtual std::size_t signature_bytes() const = 0;
};

using KeyHandle = std::shared_ptr<const AsymmetricKey>;

struct GeneratedKeyPair {
  Bytes private_der;
  Bytes public_der;
  KeyHandle private_key;
  KeyHandle public_key;
};

struct Sealed {
  Bytes ciphertext;
  Bytes tag;
};

class Provider {
 public:
  virtual ~Provider() = default;

  virtual std::string_view name() const = 0;

  virtual void random(std::span<std::uint8_t> out) = 0;
  /// Replaces the random source with a seeded deterministic stream until
  /// called again with nullopt. Test and harness determinism only.
  virtual void set_test_seed(std::optional<std::uint64_t> seed) = 0;

  virtual Bytes digest(Hash h, ByteView data) = 0;
  virtual Bytes hmac(Hash h, ByteView key, ByteView data) = 0;

  /// Unpadded CBC, CFB and CTR. CBC input must be block aligned; for CTR the
  /// iv is the full initial counter block.
  virtual Bytes block_encrypt(Algorithm a, Mode m, ByteView key, ByteView iv, ByteView data) = 0;
  virtual Bytes block_decrypt(Algorithm a, Mode m, ByteView key, ByteView iv, ByteView data) = 0;

  virtual Sealed aead_seal(Algorithm a, Mode m, ByteView key, ByteView nonce, ByteView ad,
                           ByteView plaintext) = 0;
  /// nullopt when the tag does not verify.
  virtual std::optional<Bytes> aead_open(Algorithm a, Mode m, ByteView key, ByteView nonce,
                                         ByteView ad, ByteView ciphertext, ByteView tag) = 0;

  virtual Bytes stream_xor(Algorithm a, ByteView key, ByteView nonce, ByteView data) = 0;

  /// size is modulus bits for RSA/DSA, curve name for ECDSA.
  virtual GeneratedKeyPair generate_keypair(Algorithm a, std::string_view size) = 0;
  /// Throw ParseError on malformed DER or a key of the wrong type.
  virtual KeyHandle load_private(Algorithm a, ByteView der) = 0;
  virtual KeyHandle load_public(Algorithm a, ByteView der) = 0;
  virtual Bytes public_der(const AsymmetricKey& key) = 0;

  /// RSA-OAEP with SHA-256 for both the label hash and MGF1.
  virtual Bytes oaep_encrypt(const AsymmetricKey& pub, ByteView data) = 0;
  virtual std::optional<Bytes> oaep_decrypt(const AsymmetricKey& priv, ByteView data) = 0;

  /// RSA PKCS#1 v1.5; DSA and ECDSA as fixed-width r||s.
  virtual Bytes sign(const AsymmetricKey& priv, Hash h, ByteView data) = 0;
  virtual bool verify(const AsymmetricKey& pub, Hash h, ByteView data, ByteView sig) = 0;

  /// base^exponent mod modulus, left-padded to the modulus length.
  virtual Bytes mod_exp(ByteView base, ByteView exponent, ByteView modulus) = 0;
};

/// Largest plaintext RSA-OAEP-SHA256 accepts for a modulus of this size.
inline std::size_t oaep_capacity(std::size_t modulus_bytes) {
  constexpr std::size_t kHashLen = 32;
  return modulus_bytes > 2 * kHashLen + 2 ? modulus_bytes - 2 * kHashLen - 2 : 0;
}

/// Throws ConfigError for an unknown name.
Provider& get(std::string_view name);
std::vector<std::string> registered();
void register_provider(std::unique_ptr<Provider> p);

/// The provider selected by the global configuration scope.
Provider& current();

}  // namespace secalgo::provider
