#include <gtest/gtest.h>

#include <set>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include "support.hpp"

using namespace secalgo;
using codec::Value;
using config::Scope;
using testsupport::Gen;

namespace {

struct Combo {
  std::string algorithm, size, mode;
};

// Every whitelisted (algorithm, size, mode) for encryption.
std::vector<Combo> lattice() {
  std::vector<Combo> out;
  for (Algorithm a : {Algorithm::aes, Algorithm::blowfish, Algorithm::triple_des, Algorithm::salsa20,
                      Algorithm::chacha20, Algorithm::rsa}) {
    for (Mode m : guard::allowed_modes(a)) {
      auto sizes = guard::allowed_sizes(a, m);
      if (a == Algorithm::blowfish) sizes = {"128", "256", "448"};
      if (a == Algorithm::rsa) sizes = {"2048"};
      for (const auto& s : sizes) out.push_back({std::string(name(a)), s, std::string(name(m))});
    }
  }
  return out;
}

GeneratedKey make(const Combo& c) {
  return keygen(c.algorithm, Scope(), {.size = c.size, .mode = c.mode});
}

const KeyEnvelope& enc_key(const GeneratedKey& k) {
  if (auto* e = std::get_if<KeyEnvelope>(&k)) return *e;
  return std::get<KeyPair>(k).public_key;
}

const KeyEnvelope& dec_key(const GeneratedKey& k) {
  if (auto* e = std::get_if<KeyEnvelope>(&k)) return *e;
  return std::get<KeyPair>(k).private_key;
}

std::string failure_signature(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return std::string(typeid(e).name()) + ":" + e.what();
  }
  return "no error";
}

}  // namespace

TEST(Encrypt, RoundTripsAcrossTheLattice) {
  Gen g(31);
  auto combos = lattice();
  EXPECT_GT(combos.size(), 20u);
  for (const auto& c : combos) {
    GeneratedKey k = make(c);
    for (int i = 0; i < 20; ++i) {
      Value v = g.value(3);
      ASSERT_EQ(decrypt(encrypt(v, enc_key(k)), dec_key(k)), v) << c.algorithm << " " << c.size << " " << c.mode;
    }
    ASSERT_EQ(decrypt_raw(encrypt_raw({}, enc_key(k)), dec_key(k)), Bytes{});
  }
}

TEST(Encrypt, SchemesFollowTheKey) {
  auto scheme = [](const Combo& c) { return encrypt(Value(1), enc_key(make(c))).scheme; };
  EXPECT_EQ(scheme({"AES", "256", "GCM"}), Scheme::shared_aead);
  EXPECT_EQ(scheme({"AES", "256", "CBC"}), Scheme::shared_classic);
  EXPECT_EQ(scheme({"Salsa20", "256", "none"}), Scheme::stream);
  EXPECT_EQ(scheme({"RSA", "2048", "OAEP"}), Scheme::public_direct);
}

TEST(Encrypt, FreshHeadersAndBodies) {
  KeyEnvelope k = keygen_shared("AES", Scope());
  const Value v("same plaintext");
  CipherEnvelope a = encrypt(v, k), b = encrypt(v, k);
  EXPECT_NE(a.header, b.header);
  EXPECT_NE(a.body, b.body);
  for (const char* mode : {"GCM", "CBC", "CTR"}) {
    KeyEnvelope km = keygen_shared("AES", Scope(), {.mode = mode});
    std::set<Bytes> headers;
    for (int i = 0; i < 1000; ++i) headers.insert(encrypt(v, km).header);
    EXPECT_EQ(headers.size(), 1000u) << mode;
  }
}

// Oracle: the counter block built by hand and run through EVP directly.
TEST(Encrypt, CtrCounterBlockIsPrefixThenZeros) {
  KeyEnvelope k = keygen_shared("AES", Scope(), {.mode = "CTR"});
  const Bytes pt(100, 0x42);
  CipherEnvelope env = encrypt_raw(pt, k);
  ASSERT_EQ(env.header.size(), 8u);
  Bytes counter = env.header;
  counter.resize(16, 0);
  Bytes out(pt.size());
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  int n = 0;
  ASSERT_EQ(EVP_EncryptInit_ex(ctx, EVP_aes_256_ctr(), nullptr, k.material().view().data(), counter.data()), 1);
  ASSERT_EQ(EVP_EncryptUpdate(ctx, out.data(), &n, pt.data(), static_cast<int>(pt.size())), 1);
  EVP_CIPHER_CTX_free(ctx);
  EXPECT_EQ(env.body, out);
}

TEST(Encrypt, HybridThresholdIsOaepCapacity) {
  KeyPair kp = keygen_pair("RSA", Scope());
  const std::size_t capacity = 256 - 2 * 32 - 2;
  EXPECT_EQ(provider::oaep_capacity(256), capacity);
  EXPECT_EQ(encrypt_raw(Bytes(capacity, 1), kp.public_key).scheme, Scheme::public_direct);
  CipherEnvelope h = encrypt_raw(Bytes(capacity + 1, 1), kp.public_key);
  EXPECT_EQ(h.scheme, Scheme::public_hybrid);
  EXPECT_EQ(h.wrapped_key.size(), 256u);
  Value big(Bytes(300, 7));
  CipherEnvelope e = encrypt(big, kp.public_key);
  EXPECT_EQ(e.scheme, Scheme::public_hybrid);
  EXPECT_EQ(e.wrapped_key.size(), 256u);
  EXPECT_EQ(decrypt(e, kp.private_key), big);
  EXPECT_EQ(CipherEnvelope::parse(e.serialize()), e);
}

TEST(Encrypt, KeysThatCannotEncrypt) {
  KeyPair rsa = keygen_pair("RSA", Scope());
  EXPECT_THROW(encrypt(Value(1), rsa.private_key), WrongKeyPart);
  EXPECT_THROW(decrypt(encrypt(Value(1), rsa.public_key), rsa.public_key), WrongKeyPart);
  EXPECT_THROW(encrypt(Value(1), keygen_shared("HMAC", Scope())), WrongKeyPart);
  EXPECT_THROW(encrypt(Value(1), keygen_pair("ECDSA", Scope()).public_key), WrongKeyPart);
  EXPECT_THROW(encrypt(Value(1), keygen_pair("DH", Scope()).public_key), WrongKeyPart);
}

TEST(Decrypt, TamperingFails) {
  for (const char* mode : {"GCM", "EAX", "CCM", "SIV", "OCB"}) {
    KeyEnvelope k = keygen_shared("AES", Scope(), {.size = std::string(mode) == "SIV" ? "256" : "128", .mode = mode});
    CipherEnvelope env = encrypt(Value("attack at dawn"), k);
    for (auto field : {&CipherEnvelope::body, &CipherEnvelope::tag, &CipherEnvelope::header}) {
      CipherEnvelope bad = env;
      (bad.*field)[0] ^= 1;
      EXPECT_THROW(decrypt(bad, k), DecryptionFailure) << mode;
    }
    CipherEnvelope relabelled = env;
    relabelled.mode = Mode::gcm;
    if (std::string(mode) != "GCM") EXPECT_THROW(decrypt(relabelled, k), DecryptionFailure) << mode;
  }
  KeyPair kp = keygen_pair("RSA", Scope());
  CipherEnvelope h = encrypt(Value(Bytes(400, 1)), kp.public_key);
  h.wrapped_key[10] ^= 1;
  EXPECT_THROW(decrypt(h, kp.private_key), DecryptionFailure);
}

TEST(Decrypt, CorruptedCbcPaddingFailsWithoutDetail) {
  KeyEnvelope k = keygen_shared("AES", Scope(), {.mode = "CBC"});
  // 20 plaintext bytes: the final block ends in twelve 0x0c bytes. Flipping
  // the matching byte of the previous block turns the last byte into 0x00.
  const Bytes pt(20, 0x61);
  CipherEnvelope env = encrypt_raw(pt, k);
  ASSERT_EQ(env.body.size(), 32u);
  CipherEnvelope bad = env;
  bad.body[15] ^= 0x0c;
  EXPECT_THROW(decrypt_raw(bad, k), DecryptionFailure);

  KeyEnvelope other = keygen_shared("AES", Scope(), {.mode = "GCM"});
  KeyEnvelope other_gcm = keygen_shared("AES", Scope(), {.mode = "GCM"});
  CipherEnvelope gcm = encrypt_raw(pt, other);
  CipherEnvelope bad_tag = gcm;
  bad_tag.tag[0] ^= 1;

  const std::string padding = failure_signature([&] { decrypt_raw(bad, k); });
  const std::string tag = failure_signature([&] { decrypt_raw(bad_tag, other); });
  const std::string wrong_key = failure_signature([&] { decrypt_raw(gcm, other_gcm); });
  EXPECT_EQ(padding, tag);
  EXPECT_EQ(padding, wrong_key);
  EXPECT_EQ(std::string(DecryptionFailure().what()), "decryption failed");
}

TEST(Decrypt, MalformedEnvelopes) {
  KeyEnvelope k = keygen_shared("AES", Scope());
  Bytes wire = encrypt(Value(1), k).serialize();
  EXPECT_THROW(CipherEnvelope::parse(ByteView(wire).first(3)), MalformedEncoding);
  EXPECT_THROW(CipherEnvelope::parse(ByteView(wire).first(20)), MalformedEncoding);
  Bytes v2 = wire;
  v2[0] = 2;
  EXPECT_THROW(CipherEnvelope::parse(v2), MalformedEncoding);
  Bytes bad_scheme = wire;
  bad_scheme[1] = 9;
  EXPECT_THROW(CipherEnvelope::parse(bad_scheme), MalformedEncoding);
  EXPECT_THROW(decrypt(Value(ByteView(wire).first(10)), k), DecryptionFailure);
  EXPECT_THROW(decrypt(Value("not bytes"), k), DecryptionFailure);
  KeyEnvelope cbc = keygen_shared("AES", Scope(), {.mode = "CBC"});
  Bytes c = encrypt(Value(1), cbc).serialize();
  c.pop_back();
  EXPECT_THROW(CipherEnvelope::parse(c), MalformedEncoding);
}

TEST(Decrypt, EnvelopeRoundTripsThroughBytes) {
  for (const auto& c : lattice()) {
    GeneratedKey k = make(c);
    CipherEnvelope env = encrypt(Value("wire"), enc_key(k));
    EXPECT_EQ(CipherEnvelope::parse(env.serialize()), env);
    EXPECT_EQ(CipherEnvelope::from_value(env.to_value()), env);
    EXPECT_EQ(decrypt(env.to_value(), dec_key(k)), Value("wire"));
  }
}

TEST(Sign, KeylessSignIsDigestOfEncoding) {
  const Value v(codec::Tuple{Value("a"), Value(2)});
  Bytes enc = codec::encode(v);
  Bytes want(SHA256_DIGEST_LENGTH);
  SHA256(enc.data(), enc.size(), want.data());
  EXPECT_EQ(sign(v, Scope()), want);
  Bytes want512(SHA512_DIGEST_LENGTH);
  SHA512(enc.data(), enc.size(), want512.data());
  EXPECT_EQ(sign(v, Scope().set(config::Item::sign_hash, "SHA512")), want512);
}

TEST(Sign, CombinedModeCarriesTheText) {
  KeyPair kp = keygen_pair("public", Scope(), {.sign_mode = "combined"});
  const Value k("session key");
  auto out = sign(k, kp.private_key);
  ASSERT_TRUE(std::holds_alternative<SignedPayload>(out));
  const auto& sp = std::get<SignedPayload>(out);
  EXPECT_EQ(sp.text, k);
  EXPECT_EQ(verify(sp, kp.public_key), k);
  SignedPayload forged = sp;
  forged.text = Value("other key");
  EXPECT_EQ(verify(forged, kp.public_key), std::nullopt);
  EXPECT_EQ(SignedPayload::from_value(to_value(out)), sp);
}

TEST(Sign, SoundAndCompleteForEverySigningAlgorithm) {
  Gen g(32);
  std::vector<std::pair<KeyEnvelope, KeyEnvelope>> keys;
  for (const char* h : {"SHA224", "SHA256", "SHA384", "SHA512"}) {
    KeyEnvelope mac = keygen_shared("HMAC", Scope(), {.sign_hash = h});
    keys.emplace_back(mac, mac);
    KeyEnvelope aes = keygen_shared("AES", Scope(), {.sign_hash = h});
    keys.emplace_back(aes, aes);
    for (const char* a : {"RSA", "DSA", "ECDSA"}) {
      KeyPair kp = keygen_pair(a, Scope(), {.sign_hash = h});
      keys.emplace_back(kp.private_key, kp.public_key);
    }
  }
  KeyEnvelope p384 = keygen_pair("ECDSA", Scope(), {.size = "P-384"}).private_key;
  keys.emplace_back(p384, public_half(p384));
  for (const auto& [sk, pk] : keys) {
    for (int i = 0; i < 3; ++i) {
      Value v = g.value(2), w = g.value(2);
      auto sig = std::get<Signature>(sign(v, sk));
      EXPECT_TRUE(verify(v, sig, pk)) << name(sk.algorithm()) << " " << name(sk.sign_hash());
      if (!(v == w)) EXPECT_FALSE(verify(w, sig, pk));
      Signature flipped = sig;
      flipped.bytes[flipped.bytes.size() / 2] ^= 0x10;
      EXPECT_FALSE(verify(v, flipped, pk));
      EXPECT_EQ(Signature::from_value(sig.to_value()), sig);
    }
  }
}

TEST(Sign, SignatureMustMatchTheKey) {
  KeyEnvelope a = keygen_shared("HMAC", Scope()), b = keygen_shared("HMAC", Scope());
  const Value v(1);
  auto sig = std::get<Signature>(sign(v, a));
  EXPECT_FALSE(verify(v, sig, b));
  Signature rehashed = sig;
  rehashed.hash = Hash::sha512;
  EXPECT_FALSE(verify(v, rehashed, a));
  KeyPair rsa = keygen_pair("RSA", Scope());
  EXPECT_THROW(sign(v, rsa.public_key), WrongKeyPart);
  EXPECT_THROW(verify(v, sig, rsa.private_key), WrongKeyPart);
  EXPECT_THROW(sign(v, keygen_pair("DH", Scope()).private_key), WrongKeyPart);
}

TEST(Padding, Examples) {
  Bytes p = pad_pkcs7(Bytes(13, 0xaa), 16);
  ASSERT_EQ(p.size(), 16u);
  EXPECT_EQ(Bytes(p.begin() + 13, p.end()), (Bytes{3, 3, 3}));
  Bytes full = pad_pkcs7(Bytes(16, 0xaa), 16);
  ASSERT_EQ(full.size(), 32u);
  EXPECT_EQ(Bytes(full.begin() + 16, full.end()), Bytes(16, 16));
}

TEST(Padding, RejectsInvalidPadding) {
  Bytes b(16, 0xaa);
  b.back() = 0;
  EXPECT_EQ(unpad_pkcs7(b, 16), std::nullopt);
  b.back() = 17;
  EXPECT_EQ(unpad_pkcs7(b, 16), std::nullopt);
  b.back() = 3;
  b[13] = 3;
  b[14] = 2;
  EXPECT_EQ(unpad_pkcs7(b, 16), std::nullopt);
  EXPECT_EQ(unpad_pkcs7(Bytes{}, 16), std::nullopt);
  EXPECT_EQ(unpad_pkcs7(Bytes(15, 1), 16), std::nullopt);
  EXPECT_EQ(unpad_pkcs7(Bytes(8, 8), 8), Bytes{});
}
