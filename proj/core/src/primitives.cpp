#include "secalgo/primitives.hpp"

#include "secalgo/error.hpp"
#include "secalgo/guard.hpp"
#include "secalgo/instrument.hpp"
#include "secalgo/provider.hpp"
#include "secalgo/random.hpp"

namespace secalgo {

namespace {

using instrument::Call;
using instrument::Primitive;

constexpr std::size_t kHybridKeyBytes = 32;
constexpr std::size_t kNonceBytes = 12;
constexpr std::size_t kCtrPrefixBytes = 8;

bool has_tag(Scheme s) { return s == Scheme::shared_aead || s == Scheme::public_hybrid; }

Bytes associated_data(std::uint8_t version, Algorithm a, Mode m) {
  return {version, static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(m)};
}

// Full counter block: random upper half from the envelope, zero lower half.
Bytes counter_block(ByteView prefix) {
  Bytes block(prefix.begin(), prefix.end());
  block.resize(16, 0);
  return block;
}

void check_key(const KeyEnvelope& key) {
  guard::check_labels(key.algorithm(), key.size(), key.mode(), key.sign_hash());
}

Scheme shared_scheme(const KeyEnvelope& key) {
  if (is_stream_cipher(key.algorithm())) return Scheme::stream;
  return is_aead(key.mode()) ? Scheme::shared_aead : Scheme::shared_classic;
}

void check_encrypt_key(const KeyEnvelope& key) {
  const Algorithm a = key.algorithm();
  if (key.part() == KeyPart::private_part) throw WrongKeyPart("encrypt takes a shared or public key");
  if (a == Algorithm::hmac || a == Algorithm::dh || a == Algorithm::dsa || a == Algorithm::ecdsa)
    throw WrongKeyPart(std::string(name(a)) + " keys cannot encrypt");
  check_key(key);
}

void check_decrypt_key(const KeyEnvelope& key) {
  const Algorithm a = key.algorithm();
  if (key.part() == KeyPart::public_part) throw WrongKeyPart("decrypt takes a shared or private key");
  if (a == Algorithm::hmac || a == Algorithm::dh || a == Algorithm::dsa || a == Algorithm::ecdsa)
    throw WrongKeyPart(std::string(name(a)) + " keys cannot decrypt");
  check_key(key);
}

void check_sign_key(const KeyEnvelope& key) {
  if (key.part() == KeyPart::public_part) throw WrongKeyPart("sign takes a shared or private key");
  if (!can_sign(key.algorithm())) throw WrongKeyPart("DH keys cannot sign");
  check_key(key);
}

void check_verify_key(const KeyEnvelope& key) {
  if (key.part() == KeyPart::private_part) throw WrongKeyPart("verify takes a shared or public key");
  if (!can_sign(key.algorithm())) throw WrongKeyPart("DH keys cannot verify");
  check_key(key);
}

// Any shared key signs with HMAC under its sign_hash label.
Algorithm signature_algorithm(const KeyEnvelope& key) {
  return key.part() == KeyPart::secret ? Algorithm::hmac : key.algorithm();
}

Signature make_signature(ByteView data, const KeyEnvelope& key) {
  auto& prov = provider::current();
  Signature sig;
  sig.algorithm = signature_algorithm(key);
  sig.hash = key.sign_hash();
  if (key.part() == KeyPart::secret)
    sig.bytes = prov.hmac(key.sign_hash(), key.material().view(), data);
  else
    sig.bytes = prov.sign(*key.handle(), key.sign_hash(), data);
  return sig;
}

bool check_signature(ByteView data, const Signature& sig, const KeyEnvelope& key) {
  if (sig.algorithm != signature_algorithm(key) || sig.hash != key.sign_hash()) return false;
  auto& prov = provider::current();
  if (key.part() == KeyPart::secret) {
    Bytes mac = prov.hmac(key.sign_hash(), key.material().view(), data);
    return mac.size() == sig.bytes.size() && equal_ct(mac, sig.bytes);
  }
  return prov.verify(*key.handle(), key.sign_hash(), data, sig.bytes);
}

Bytes decrypt_unchecked(const CipherEnvelope& env, const KeyEnvelope& key) {
  if (env.version != kEnvelopeVersion || env.algorithm != key.algorithm() || env.mode != key.mode())
    throw DecryptionFailure();
  if (env.header.size() != header_size(env.scheme, env.algorithm, env.mode)) throw DecryptionFailure();
  auto& prov = provider::current();
  const Algorithm a = key.algorithm();
  const Bytes ad = associated_data(env.version, env.algorithm, env.mode);

  if (key.part() == KeyPart::secret) {
    if (env.scheme != shared_scheme(key)) throw DecryptionFailure();
    ByteView k = key.material().view();
    switch (env.scheme) {
      case Scheme::shared_aead: {
        auto pt = prov.aead_open(a, env.mode, k, env.header, ad, env.body, env.tag);
        if (!pt) throw DecryptionFailure();
        return std::move(*pt);
      }
      case Scheme::shared_classic: {
        if (env.mode == Mode::ctr) return prov.block_decrypt(a, Mode::ctr, k, counter_block(env.header), env.body);
        if (env.mode == Mode::cfb) return prov.block_decrypt(a, Mode::cfb, k, env.header, env.body);
        const std::size_t bs = block_size(a);
        if (env.body.empty() || env.body.size() % bs != 0) throw DecryptionFailure();
        auto pt = unpad_pkcs7(prov.block_decrypt(a, Mode::cbc, k, env.header, env.body), bs);
        if (!pt) throw DecryptionFailure();
        return std::move(*pt);
      }
      case Scheme::stream:
        return prov.stream_xor(a, k, env.header, env.body);
      default:
        throw DecryptionFailure();
    }
  }

  const provider::AsymmetricKey& priv = *key.handle();
  if (env.scheme == Scheme::public_direct) {
    auto pt = prov.oaep_decrypt(priv, env.body);
    if (!pt) throw DecryptionFailure();
    return std::move(*pt);
  }
  if (env.scheme != Scheme::public_hybrid || env.wrapped_key.size() != priv.modulus_bytes())
    throw DecryptionFailure();
  auto session = prov.oaep_decrypt(priv, env.wrapped_key);
  if (!session || session->size() != kHybridKeyBytes) throw DecryptionFailure();
  SecureBytes session_key(std::move(*session));
  auto pt = prov.aead_open(Algorithm::aes, Mode::gcm, session_key.view(), env.header, ad, env.body, env.tag);
  if (!pt) throw DecryptionFailure();
  return std::move(*pt);
}

}  // namespace

std::string_view name(Scheme s) {
  switch (s) {
    case Scheme::shared_aead: return "shared-aead";
    case Scheme::shared_classic: return "shared-classic";
    case Scheme::stream: return "stream";
    case Scheme::public_direct: return "public-direct";
    case Scheme::public_hybrid: return "public-hybrid";
  }
  return "?";
}

std::size_t header_size(Scheme s, Algorithm a, Mode m) {
  switch (s) {
    case Scheme::shared_aead:
      if (a == Algorithm::aes && is_aead(m)) return kNonceBytes;
      break;
    case Scheme::shared_classic:
      if (!is_block_cipher(a)) break;
      if (m == Mode::cbc || m == Mode::cfb) return block_size(a);
      if (m == Mode::ctr && a == Algorithm::aes) return kCtrPrefixBytes;
      break;
    case Scheme::stream:
      if (m != Mode::none) break;
      if (a == Algorithm::salsa20) return 8;
      if (a == Algorithm::chacha20) return 12;
      break;
    case Scheme::public_direct:
      if (a == Algorithm::rsa && m == Mode::oaep) return 0;
      break;
    case Scheme::public_hybrid:
      if (a == Algorithm::rsa && m == Mode::oaep) return kNonceBytes;
      break;
  }
  throw MalformedEncoding("no envelope layout for " + std::string(name(a)) + "/" + std::string(name(m)) +
                          " in scheme " + std::string(name(s)));
}

Bytes CipherEnvelope::serialize() const {
  Bytes out;
  out.reserve(4 + header.size() + 4 + wrapped_key.size() + body.size() + tag.size());
  out.push_back(version);
  out.push_back(static_cast<std::uint8_t>(scheme));
  out.push_back(static_cast<std::uint8_t>(algorithm));
  out.push_back(static_cast<std::uint8_t>(mode));
  append(out, header);
  if (scheme == Scheme::public_hybrid) {
    append_u32_be(out, static_cast<std::uint32_t>(wrapped_key.size()));
    append(out, wrapped_key);
  }
  append(out, body);
  if (has_tag(scheme)) append(out, tag);
  return out;
}

CipherEnvelope CipherEnvelope::parse(ByteView wire) {
  if (wire.size() < 4) throw MalformedEncoding("envelope shorter than its fixed header");
  CipherEnvelope env;
  env.version = wire[0];
  if (env.version != kEnvelopeVersion) throw MalformedEncoding("unsupported envelope version");
  if (wire[1] < 1 || wire[1] > 5) throw MalformedEncoding("unknown scheme");
  env.scheme = static_cast<Scheme>(wire[1]);
  auto a = algorithm_from_id(wire[2]);
  auto m = mode_from_id(wire[3]);
  if (!a || !m) throw MalformedEncoding("unknown algorithm or mode id");
  env.algorithm = *a;
  env.mode = *m;

  ByteView rest = wire.subspan(4);
  const std::size_t hs = header_size(env.scheme, env.algorithm, env.mode);
  if (rest.size() < hs) throw MalformedEncoding("truncated envelope header");
  env.header.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(hs));
  rest = rest.subspan(hs);

  if (env.scheme == Scheme::public_hybrid) {
    if (rest.size() < 4) throw MalformedEncoding("truncated wrapped key length");
    std::uint32_t n = read_u32_be(rest.first(4));
    rest = rest.subspan(4);
    if (rest.size() < n) throw MalformedEncoding("truncated wrapped key");
    env.wrapped_key.assign(rest.begin(), rest.begin() + n);
    rest = rest.subspan(n);
  }
  if (has_tag(env.scheme)) {
    if (rest.size() < kTagBytes) throw MalformedEncoding("truncated tag");
    env.tag.assign(rest.end() - kTagBytes, rest.end());
    rest = rest.first(rest.size() - kTagBytes);
  }
  if (env.scheme == Scheme::shared_classic && env.mode == Mode::cbc &&
      (rest.empty() || rest.size() % block_size(env.algorithm) != 0))
    throw MalformedEncoding("CBC body is not a positive multiple of the block size");
  env.body.assign(rest.begin(), rest.end());
  return env;
}

codec::Value Signature::to_value() const {
  return codec::Tuple{codec::Value(static_cast<std::int64_t>(algorithm)),
                      codec::Value(static_cast<std::int64_t>(hash)), codec::Value(bytes)};
}

Signature Signature::from_value(const codec::Value& v) {
  const auto& t = v.as_tuple(3);
  auto id = [](std::int64_t i) -> std::uint8_t {
    if (i < 0 || i > 255) throw MalformedEncoding("identifier out of range");
    return static_cast<std::uint8_t>(i);
  };
  auto a = algorithm_from_id(id(t[0].as_int()));
  auto h = hash_from_id(id(t[1].as_int()));
  if (!a || !h) throw MalformedEncoding("unknown signature algorithm or hash");
  return {*a, *h, t[2].as_bytes()};
}

codec::Value SignedPayload::to_value() const {
  return codec::Tuple{text, codec::Value(static_cast<std::int64_t>(signature.algorithm)),
                      codec::Value(static_cast<std::int64_t>(signature.hash)), codec::Value(signature.bytes)};
}

SignedPayload SignedPayload::from_value(const codec::Value& v) {
  const auto& t = v.as_tuple(4);
  return {t[0], Signature::from_value(codec::Tuple{t[1], t[2], t[3]})};
}

codec::Value to_value(const SignOutput& out) {
  return std::visit([](const auto& o) { return o.to_value(); }, out);
}

CipherEnvelope encrypt_raw(ByteView plaintext, const KeyEnvelope& key) {
  Call call(Primitive::encrypt);
  check_encrypt_key(key);
  auto& prov = provider::current();
  const Algorithm a = key.algorithm();

  CipherEnvelope env;
  env.algorithm = a;
  env.mode = key.mode();

  if (key.part() == KeyPart::public_part) {
    const provider::AsymmetricKey& pub = *key.handle();
    if (plaintext.size() <= provider::oaep_capacity(pub.modulus_bytes())) {
      env.scheme = Scheme::public_direct;
      env.body = prov.oaep_encrypt(pub, plaintext);
      return env;
    }
    env.scheme = Scheme::public_hybrid;
    SecureBytes session(random_bytes(kHybridKeyBytes));
    env.header = random_bytes(kNonceBytes);
    auto sealed = prov.aead_seal(Algorithm::aes, Mode::gcm, session.view(), env.header,
                                 associated_data(env.version, a, env.mode), plaintext);
    env.wrapped_key = prov.oaep_encrypt(pub, session.view());
    env.body = std::move(sealed.ciphertext);
    env.tag = std::move(sealed.tag);
    return env;
  }

  ByteView k = key.material().view();
  env.scheme = shared_scheme(key);
  env.header = random_bytes(header_size(env.scheme, a, env.mode));
  switch (env.scheme) {
    case Scheme::shared_aead: {
      auto sealed = prov.aead_seal(a, env.mode, k, env.header, associated_data(env.version, a, env.mode), plaintext);
      env.body = std::move(sealed.ciphertext);
      env.tag = std::move(sealed.tag);
      break;
    }
    case Scheme::shared_classic:
      if (env.mode == Mode::ctr)
        env.body = prov.block_encrypt(a, Mode::ctr, k, counter_block(env.header), plaintext);
      else if (env.mode == Mode::cfb)
        env.body = prov.block_encrypt(a, Mode::cfb, k, env.header, plaintext);
      else
        env.body = prov.block_encrypt(a, Mode::cbc, k, env.header, pad_pkcs7(plaintext, block_size(a)));
      break;
    case Scheme::stream:
      env.body = prov.stream_xor(a, k, env.header, plaintext);
      break;
    default:
      break;
  }
  return env;
}

CipherEnvelope encrypt(const codec::Value& text, const KeyEnvelope& key) {
  Call call(Primitive::encrypt);
  return encrypt_raw(codec::encode(text), key);
}

Bytes decrypt_raw(const CipherEnvelope& env, const KeyEnvelope& key) {
  Call call(Primitive::decrypt);
  check_decrypt_key(key);
  try {
    return decrypt_unchecked(env, key);
  } catch (const DecryptionFailure&) {
    throw;
  } catch (const Error&) {
    throw DecryptionFailure();
  }
}

codec::Value decrypt(const CipherEnvelope& env, const KeyEnvelope& key) {
  Call call(Primitive::decrypt);
  Bytes pt = decrypt_raw(env, key);
  try {
    return codec::decode(pt);
  } catch (const Error&) {
    throw DecryptionFailure();
  }
}

codec::Value decrypt(const codec::Value& env, const KeyEnvelope& key) {
  Call call(Primitive::decrypt);
  check_decrypt_key(key);
  CipherEnvelope parsed;
  try {
    parsed = CipherEnvelope::from_value(env);
  } catch (const Error&) {
    throw DecryptionFailure();
  }
  return decrypt(parsed, key);
}

SignOutput sign_raw(ByteView text, const KeyEnvelope& key) {
  Call call(Primitive::sign);
  check_sign_key(key);
  Signature sig = make_signature(text, key);
  if (key.sign_mode() == SignMode::combined) return SignedPayload{codec::Value(text), std::move(sig)};
  return sig;
}

SignOutput sign(const codec::Value& text, const KeyEnvelope& key) {
  Call call(Primitive::sign);
  check_sign_key(key);
  Signature sig = make_signature(codec::encode(text), key);
  if (key.sign_mode() == SignMode::combined) return SignedPayload{text, std::move(sig)};
  return sig;
}

Bytes sign(const codec::Value& text, const config::Scope& scope) {
  Call call(Primitive::sign);
  auto h = parse_hash(scope.resolve(config::Item::sign_hash));
  if (!h) throw MisuseError(MisuseClass::M1H, "sign_hash " + scope.resolve(config::Item::sign_hash));
  return provider::current().digest(*h, codec::encode(text));
}

bool verify_raw(ByteView text, const Signature& sig, const KeyEnvelope& key) {
  Call call(Primitive::verify);
  check_verify_key(key);
  return check_signature(text, sig, key);
}

bool verify(const codec::Value& text, const Signature& sig, const KeyEnvelope& key) {
  Call call(Primitive::verify);
  check_verify_key(key);
  return check_signature(codec::encode(text), sig, key);
}

std::optional<codec::Value> verify(const SignedPayload& signed_text, const KeyEnvelope& key) {
  Call call(Primitive::verify);
  check_verify_key(key);
  if (!check_signature(codec::encode(signed_text.text), signed_text.signature, key)) return std::nullopt;
  return signed_text.text;
}

std::optional<Bytes> verify_raw(const SignedPayload& signed_text, const KeyEnvelope& key) {
  Call call(Primitive::verify);
  check_verify_key(key);
  const Bytes& text = signed_text.text.as_bytes();
  if (!check_signature(text, signed_text.signature, key)) return std::nullopt;
  return text;
}

Bytes pad_pkcs7(ByteView data, std::size_t block_size) {
  const std::size_t n = block_size - (data.size() % block_size);
  Bytes out(data.begin(), data.end());
  out.insert(out.end(), n, static_cast<std::uint8_t>(n));
  return out;
}

// Examines the whole final block regardless of where it fails.
std::optional<Bytes> unpad_pkcs7(ByteView data, std::size_t block_size) {
  if (data.empty() || data.size() % block_size != 0) return std::nullopt;
  const std::uint8_t n = data.back();
  unsigned bad = (n == 0) | (n > block_size);
  for (std::size_t i = 1; i <= block_size; ++i) {
    const std::uint8_t b = data[data.size() - i];
    const unsigned inside = i <= n;
    bad |= inside & (b != n);
  }
  if (bad) return std::nullopt;
  return Bytes(data.begin(), data.end() - n);
}

}  // namespace secalgo
