#include <gtest/gtest.h>

#include <set>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/miller_rabin.hpp>
#include <json.hpp>
#include <openssl/bn.h>
#include <openssl/dh.h>

#include "support.hpp"

using namespace secalgo;
using config::Item;
using config::Scope;
namespace mp = boost::multiprecision;

namespace {

mp::cpp_int to_int(ByteView b) {
  mp::cpp_int v;
  import_bits(v, b.begin(), b.end());
  return v;
}

Bytes bn_bytes(const BIGNUM* bn) {
  Bytes out(static_cast<std::size_t>(BN_num_bytes(bn)));
  BN_bn2bin(bn, out.data());
  return out;
}

std::optional<MisuseClass> keygen_misuse(std::string_view type, const Scope& scope, const KeygenOptions& o = {}) {
  try {
    keygen(type, scope, o);
  } catch (const MisuseError& e) {
    return e.misuse();
  }
  return std::nullopt;
}

std::optional<MisuseClass> import_misuse(const std::string& text) {
  try {
    import_key(text);
  } catch (const MisuseError& e) {
    return e.misuse();
  }
  return std::nullopt;
}

std::string tamper(const KeyEnvelope& k, const std::string& field, const nlohmann::json& v) {
  auto j = nlohmann::ordered_json::parse(export_key(k));
  j[field] = v;
  return j.dump();
}

}  // namespace

TEST(Keygen, SharedDefaultsToAes256Gcm) {
  KeyEnvelope k = keygen_shared("shared", Scope());
  EXPECT_EQ(k.algorithm(), Algorithm::aes);
  EXPECT_EQ(k.size(), "256");
  EXPECT_EQ(k.mode(), Mode::gcm);
  EXPECT_EQ(k.part(), KeyPart::secret);
  EXPECT_EQ(k.sign_hash(), Hash::sha256);
  EXPECT_EQ(k.material().size(), 32u);
}

TEST(Keygen, PublicDefaultsToRsa2048) {
  KeyPair kp = keygen_pair("public", Scope());
  EXPECT_EQ(kp.private_key.algorithm(), Algorithm::rsa);
  EXPECT_EQ(kp.private_key.size(), "2048");
  EXPECT_EQ(kp.private_key.mode(), Mode::oaep);
  EXPECT_EQ(kp.private_key.part(), KeyPart::private_part);
  EXPECT_EQ(kp.public_key.part(), KeyPart::public_part);
  EXPECT_EQ(public_half(kp.private_key), kp.public_key);
}

TEST(Keygen, InsufficientSizeIsM1K) {
  EXPECT_EQ(keygen_misuse("AES", Scope(), {.size = "64"}), MisuseClass::M1K);
  // Oracle: 64 is below every whitelisted AES size.
  for (const auto& s : guard::allowed_sizes(Algorithm::aes, Mode::gcm)) EXPECT_GT(std::stoi(s), 64);
  EXPECT_EQ(keygen_misuse("AES", Scope().set(Item::key_size_shared, "64")), MisuseClass::M1K);
  EXPECT_EQ(keygen_misuse("RSA", Scope().set(Item::key_size_public, "1024")), MisuseClass::M1K);
}

TEST(Keygen, OtherMisuseThroughArgumentsAndConfig) {
  EXPECT_EQ(keygen_misuse("AES", Scope(), {.mode = "ECB"}), MisuseClass::M1S);
  EXPECT_EQ(keygen_misuse("DES", Scope()), MisuseClass::M3S);
  EXPECT_EQ(keygen_misuse("RSA", Scope(), {.mode = "none"}), MisuseClass::M1A);
  EXPECT_EQ(keygen_misuse("AES", Scope(), {.sign_hash = "MD5"}), MisuseClass::M1H);
  EXPECT_EQ(keygen_misuse("Blowfish", Scope().set(Item::block_cipher_mode, "CTR")), MisuseClass::M1S);
  EXPECT_THROW(keygen("NotACipher", Scope()), UnknownAlgorithm);
  EXPECT_THROW(keygen_pair("AES", Scope()), UnknownAlgorithm);
  EXPECT_THROW(keygen_shared("RSA", Scope()), UnknownAlgorithm);
}

TEST(Keygen, TableDefaultsFallBackPerAlgorithm) {
  KeyEnvelope bf = keygen_shared("Blowfish", Scope());
  EXPECT_EQ(bf.mode(), Mode::cbc);
  EXPECT_EQ(bf.size(), "256");
  KeyEnvelope tdes = keygen_shared("3DES", Scope());
  EXPECT_EQ(tdes.size(), "192");
  EXPECT_EQ(tdes.mode(), Mode::cbc);
  EXPECT_EQ(keygen_shared("ChaCha20", Scope()).mode(), Mode::none);
  EXPECT_EQ(keygen_shared("Salsa20", Scope().set(Item::block_cipher_mode, "CBC")).mode(), Mode::none);
  KeyEnvelope mac = keygen_shared("HMAC", Scope(), {.size = "384", .sign_hash = "SHA512"});
  EXPECT_EQ(mac.material().size(), 48u);
  EXPECT_EQ(mac.sign_hash(), Hash::sha512);
  EXPECT_EQ(keygen_pair("ECDSA", Scope()).public_key.size(), "P-256");
  EXPECT_EQ(keygen_pair("DH", Scope()).public_key.size(), "modp-2048");
  EXPECT_EQ(keygen_shared("AES", Scope(), {.size = "512", .mode = "siv"}).material().size(), 64u);
  EXPECT_EQ(keygen_shared("shared", Scope().set(Item::key_type_shared, "ChaCha20")).algorithm(), Algorithm::chacha20);
  EXPECT_EQ(keygen_pair("public", Scope().set(Item::key_type_public, "ECDSA").set(Item::key_size_public, "P-384"))
                .private_key.size(),
            "P-384");
}

TEST(Keygen, MaterialIsFreshEveryCall) {
  std::set<Bytes> seen;
  for (int i = 0; i < 100; ++i) {
    KeyEnvelope k = keygen_shared("AES", Scope());
    seen.insert(Bytes(k.material().view().begin(), k.material().view().end()));
  }
  EXPECT_EQ(seen.size(), 100u);
}

TEST(Keygen, PairsRoundTrip) {
  const codec::Value text("pair round trip");
  for (const char* a : {"RSA", "DSA", "ECDSA"}) {
    KeyPair kp = keygen_pair(a, Scope(), {.sign_mode = "detached"});
    auto sig = std::get<Signature>(sign(text, kp.private_key));
    EXPECT_TRUE(verify(text, sig, kp.public_key)) << a;
  }
  KeyPair rsa = keygen_pair("RSA", Scope(), {.size = "3072"});
  EXPECT_EQ(decrypt(encrypt(text, rsa.public_key), rsa.private_key), text);
}

TEST(KeyEnvelope, ValidatedConstruction) {
  EXPECT_THROW(KeyEnvelope::create(Algorithm::aes, "256", Mode::gcm, KeyPart::secret, Hash::sha256,
                                   SignMode::detached, SecureBytes(Bytes(16))),
               ParseError);
  EXPECT_THROW(KeyEnvelope::create(Algorithm::aes, "256", Mode::gcm, KeyPart::private_part, Hash::sha256,
                                   SignMode::detached, SecureBytes(Bytes(32))),
               WrongKeyPart);
  EXPECT_THROW(KeyEnvelope::create(Algorithm::aes, "256", Mode::none, KeyPart::secret,
                                   Hash::sha256, SignMode::detached, SecureBytes(Bytes(32))),
               MisuseError);
}

TEST(KeyFile, RoundTripsEveryKind) {
  std::vector<KeyEnvelope> keys{keygen_shared("AES", Scope()), keygen_shared("Blowfish", Scope(), {.size = "128"}),
                                keygen_shared("HMAC", Scope())};
  for (const char* a : {"RSA", "DSA", "ECDSA", "DH"}) {
    KeyPair kp = keygen_pair(a, Scope());
    keys.push_back(kp.private_key);
    keys.push_back(kp.public_key);
  }
  for (const auto& k : keys) {
    EXPECT_EQ(import_key(export_key(k)), k) << export_key(k);
    EXPECT_EQ(key_from_value(codec::decode(codec::encode(to_value(k)))), k);
  }
}

TEST(KeyFile, LayoutIsCanonicalJson) {
  auto j = nlohmann::ordered_json::parse(export_key(keygen_shared("AES", Scope())));
  std::vector<std::string> fields;
  for (auto it = j.begin(); it != j.end(); ++it) fields.push_back(it.key());
  EXPECT_EQ(fields, (std::vector<std::string>{"version", "algorithm", "size", "mode", "part", "sign_hash",
                                              "sign_mode", "material"}));
  EXPECT_TRUE(j["size"].is_number_integer());
  EXPECT_EQ(j["version"], 1);
}

TEST(KeyFile, TamperedLabelsAreMisuse) {
  KeyEnvelope aes = keygen_shared("AES", Scope());
  EXPECT_EQ(import_misuse(tamper(aes, "mode", "ECB")), MisuseClass::M1S);
  EXPECT_EQ(import_misuse(tamper(aes, "size", 64)), MisuseClass::M1K);
  EXPECT_EQ(import_misuse(tamper(aes, "algorithm", "DES")), MisuseClass::M3S);
  EXPECT_EQ(import_misuse(tamper(aes, "sign_hash", "MD5")), MisuseClass::M1H);
  KeyPair rsa = keygen_pair("RSA", Scope());
  EXPECT_EQ(import_misuse(tamper(rsa.public_key, "mode", "none")), MisuseClass::M1A);
  EXPECT_EQ(import_misuse(tamper(rsa.public_key, "size", 1024)), MisuseClass::M1K);
}

TEST(KeyFile, MalformedFilesAreParseErrors) {
  std::string text = export_key(keygen_shared("AES", Scope()));
  EXPECT_THROW(import_key(text.substr(0, text.size() / 2)), ParseError);
  EXPECT_THROW(import_key(""), ParseError);
  EXPECT_THROW(import_key("[]"), ParseError);
  auto j = nlohmann::ordered_json::parse(text);
  j["extra"] = 1;
  EXPECT_THROW(import_key(j.dump()), ParseError);
  j.erase("extra");
  j["version"] = 2;
  EXPECT_THROW(import_key(j.dump()), ParseError);
  j["version"] = 1;
  j["part"] = "private";
  EXPECT_THROW(import_key(j.dump()), WrongKeyPart);
  j["part"] = "secret";
  j["material"] = base64url_encode(Bytes(31));
  EXPECT_THROW(import_key(j.dump()), ParseError);
  KeyPair rsa = keygen_pair("RSA", Scope());
  EXPECT_THROW(import_key(tamper(rsa.public_key, "size", 3072)), ParseError);
}

// Oracle: repeated multiplication, no modular exponentiation routine.
TEST(Dh, TinyGroupMatchesBruteForce) {
  auto brute = [](unsigned g, unsigned e, unsigned p) {
    unsigned r = 1;
    for (unsigned i = 0; i < e; ++i) r = r * g % p;
    return r;
  };
  DhGroup tiny{"tiny", Bytes{23}, Bytes{5}, {}};
  const Bytes x{6}, y{15};
  EXPECT_EQ(dh_public_value(tiny, x), Bytes{static_cast<std::uint8_t>(brute(5, 6, 23))});
  EXPECT_EQ(dh_public_value(tiny, y), Bytes{static_cast<std::uint8_t>(brute(5, 15, 23))});
  EXPECT_EQ(dh_public_value(tiny, x), Bytes{8});
  EXPECT_EQ(dh_public_value(tiny, y), Bytes{19});
  const Bytes a = dh_agree(tiny, x, dh_public_value(tiny, y));
  EXPECT_EQ(a, dh_agree(tiny, y, dh_public_value(tiny, x)));
  EXPECT_EQ(a, Bytes{static_cast<std::uint8_t>(brute(5, 6 * 15, 23))});
  EXPECT_EQ(a, Bytes{2});
}

TEST(Dh, ShippedGroupsMatchIndependentSources) {
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wdeprecated-declarations"
  struct Ref {
    const char* name;
    BIGNUM* (*prime)(BIGNUM*);
  };
  for (auto [n, f] : {Ref{"modp-2048", BN_get_rfc3526_prime_2048}, Ref{"modp-3072", BN_get_rfc3526_prime_3072},
                      Ref{"modp-4096", BN_get_rfc3526_prime_4096}}) {
    BIGNUM* p = f(nullptr);
    const DhGroup& g = dh_group(n);
    EXPECT_EQ(g.p, bn_bytes(p)) << n;
    EXPECT_EQ(g.g, Bytes{2});
    BN_free(p);
  }
  for (auto [n, f] : {std::pair{"rfc5114-2048-224", DH_get_2048_224}, std::pair{"rfc5114-2048-256", DH_get_2048_256}}) {
    DH* dh = f();
    const BIGNUM *p, *q, *gen;
    DH_get0_pqg(dh, &p, &q, &gen);
    const DhGroup& g = dh_group(n);
    EXPECT_EQ(g.p, bn_bytes(p)) << n;
    EXPECT_EQ(g.q, bn_bytes(q)) << n;
    EXPECT_EQ(g.g, bn_bytes(gen)) << n;
    DH_free(dh);
  }
#pragma GCC diagnostic pop
  for (const auto& n : dh_group_names()) {
    const DhGroup& g = dh_group(n);
    mp::cpp_int p = to_int(g.p), q = to_int(g.q), gen = to_int(g.g);
    EXPECT_TRUE(mp::miller_rabin_test(q, 8)) << n;
    EXPECT_EQ(mp::powm(gen, q, p), 1) << n;
    EXPECT_EQ((p - 1) % q, 0) << n;
  }
}

TEST(Dh, KeygenAndAgreement) {
  KeyPair a = dh_keygen("modp-2048"), b = dh_keygen("modp-2048");
  const DhGroup& g = dh_group("modp-2048");
  mp::cpp_int p = to_int(g.p), y = to_int(a.public_key.material().view());
  EXPECT_GT(y, 1);
  EXPECT_LT(y, p - 1);
  EXPECT_EQ(y, mp::powm(to_int(g.g), to_int(a.private_key.material().view()), p));
  EXPECT_NE(a.private_key.material(), b.private_key.material());
  Bytes s1 = dh_shared_secret(a.private_key, b.public_key);
  EXPECT_EQ(s1, dh_shared_secret(b.private_key, a.public_key));
  EXPECT_EQ(s1.size(), g.p.size());
  EXPECT_THROW(dh_keygen("bogus"), UnknownGroup);
}

TEST(Dh, RejectsDegenerateAndMismatchedPeers) {
  const DhGroup& g = dh_group("modp-2048");
  KeyPair a = dh_keygen("modp-2048");
  Bytes one(g.p.size());
  one.back() = 1;
  EXPECT_THROW(dh_agree(g, a.private_key.material().view(), one), DegenerateValue);
  Bytes pm1 = g.p;
  pm1.back() -= 1;
  EXPECT_THROW(dh_agree(g, a.private_key.material().view(), pm1), DegenerateValue);
  EXPECT_THROW(dh_agree(g, a.private_key.material().view(), g.p), DegenerateValue);
  // A generator of the full group is outside the prime-order subgroup of a
  // safe prime when it is a non-residue; p-2 is one for these primes.
  Bytes pm2 = g.p;
  pm2.back() -= 2;
  mp::cpp_int p = to_int(g.p);
  if (mp::powm(p - 2, (p - 1) / 2, p) != 1) EXPECT_THROW(dh_agree(g, a.private_key.material().view(), pm2), DegenerateValue);
  KeyPair other = dh_keygen("modp-3072");
  EXPECT_THROW(dh_shared_secret(a.private_key, other.public_key), GroupMismatch);
  EXPECT_THROW(dh_shared_secret(a.public_key, a.public_key), WrongKeyPart);
}
