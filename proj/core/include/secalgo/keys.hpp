#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "secalgo/bytes.hpp"
#include "secalgo/codec.hpp"
#include "secalgo/config.hpp"
#include "secalgo/labels.hpp"
#include "secalgo/provider.hpp"

namespace secalgo {

/// Key material plus the labels that drive every later operation. Instances
/// are validated at construction and immutable afterwards.
///
/// Material layout by algorithm:
///   shared ciphers, HMAC   raw key bytes, exactly size bits long
///   RSA, DSA, ECDSA        DER private key / SubjectPublicKeyInfo
///   DH                     big-endian exponent / public value
class KeyEnvelope {
 public:
  static constexpr int kVersion = 1;

  /// Validates the labels with the guard, the part against the algorithm,
  /// and the material against the labels. Throws MisuseError, ParseError or
  /// WrongKeyPart. A handle already parsed from `material` skips parsing it
  /// again.
  static KeyEnvelope create(Algorithm algorithm, std::string size, Mode mode, KeyPart part,
                            Hash sign_hash, SignMode sign_mode, SecureBytes material,
                            provider::KeyHandle handle = nullptr);

  int version() const { return version_; }
  Algorithm algorithm() const { return algorithm_; }
  /// Bits as decimal text, or a curve or group name.
  const std::string& size() const { return size_; }
  Mode mode() const { return mode_; }
  KeyPart part() const { return part_; }
  Hash sign_hash() const { return sign_hash_; }
  SignMode sign_mode() const { return sign_mode_; }
  const SecureBytes& material() const { return material_; }

  /// Parsed backend key for RSA, DSA and ECDSA; null otherwise.
  const provider::AsymmetricKey* handle() const { return handle_.get(); }

  friend bool operator==(const KeyEnvelope& a, const KeyEnvelope& b);

 private:
  KeyEnvelope() = default;

  int version_ = kVersion;
  Algorithm algorithm_ = Algorithm::aes;
  std::string size_;
  Mode mode_ = Mode::none;
  KeyPart part_ = KeyPart::secret;
  Hash sign_hash_ = Hash::sha256;
  SignMode sign_mode_ = SignMode::detached;
  SecureBytes material_;
  provider::KeyHandle handle_;
};

struct KeyPair {
  KeyEnvelope private_key;
  KeyEnvelope public_key;
};

/// Per-call overrides. Each one behaves like a binding in an anonymous scope
/// nested inside the scope passed to keygen.
struct KeygenOptions {
  std::optional<std::string> size;
  std::optional<std::string> mode;
  std::optional<std::string> sign_hash;
  std::optional<std::string> sign_mode;
};

using GeneratedKey = std::variant<KeyEnvelope, KeyPair>;

/// `type` is an algorithm name or the generic "shared" / "public". Shared
/// algorithms yield one envelope, public-key algorithms a pair. Throws
/// MisuseError or UnknownAlgorithm.
GeneratedKey keygen(std::string_view type, const config::Scope& scope = config::global_scope(),
                    const KeygenOptions& options = {});

/// Typed conveniences; throw UnknownAlgorithm when the type yields the other
/// kind of key.
KeyEnvelope keygen_shared(std::string_view type = "shared",
                          const config::Scope& scope = config::global_scope(),
                          const KeygenOptions& options = {});
KeyPair keygen_pair(std::string_view type = "public",
                    const config::Scope& scope = config::global_scope(),
                    const KeygenOptions& options = {});

// Diffie-Hellman over the shipped RFC 3526 / RFC 5114 groups.

struct DhGroup {
  std::string name;
  Bytes p;
  Bytes g;
  Bytes q;  // subgroup order; empty when unknown

  std::size_t modulus_bytes() const { return p.size(); }
};

/// Throws UnknownGroup.
const DhGroup& dh_group(std::string_view name);
std::vector<std::string> dh_group_names();

/// g^x mod p, fixed width.
Bytes dh_public_value(const DhGroup& group, ByteView exponent);
/// peer^x mod p, fixed width. Throws DegenerateValue for peer values in
/// {0, 1, p-1}, out of range, or outside the prime-order subgroup.
Bytes dh_agree(const DhGroup& group, ByteView exponent, ByteView peer_public);

/// Fresh exponent in [2, q-2] (or [2, p-3] without q) and its public value.
/// Counted as keygen.
KeyPair dh_keygen(std::string_view group);

/// Throws GroupMismatch, WrongKeyPart, DegenerateValue.
Bytes dh_shared_secret(const KeyEnvelope& private_key, const KeyEnvelope& peer_public);

/// Canonical JSON record: fields version, algorithm, size, mode, part,
/// sign_hash, sign_mode, material (base64url) in that order.
std::string export_key(const KeyEnvelope& key);
/// Re-runs every check create() performs; the guard sees the labels as text
/// first, so tampered labels surface as MisuseError. Throws ParseError.
KeyEnvelope import_key(std::string_view text);

/// Keys inside protocol messages: a tuple of the same fields.
codec::Value to_value(const KeyEnvelope& key);
KeyEnvelope key_from_value(const codec::Value& v);

/// Public half of a private envelope (same labels).
KeyEnvelope public_half(const KeyEnvelope& private_key);

}  // namespace secalgo
