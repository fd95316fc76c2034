#include <gtest/gtest.h>

#include "support.hpp"

using namespace secalgo;
using guard::KeySpec;

namespace {

std::optional<MisuseClass> thrown(const KeySpec& s) {
  try {
    guard::check_key_spec(s);
  } catch (const MisuseError& e) {
    return e.misuse();
  }
  return std::nullopt;
}

}  // namespace

TEST(Guard, Examples) {
  EXPECT_EQ(guard::classify({"AES", "256", "GCM", "SHA256"}), std::nullopt);
  EXPECT_EQ(guard::classify({"DES", "64", "CBC", "SHA256"}), MisuseClass::M3S);
  EXPECT_EQ(guard::classify({"AES", "256", "CBC", "MD5"}), MisuseClass::M1H);
  EXPECT_EQ(guard::classify({"AES", "64", "GCM", "SHA256"}), MisuseClass::M1K);
  EXPECT_EQ(guard::classify({"AES", "256", "ECB", "SHA256"}), MisuseClass::M1S);
  EXPECT_EQ(guard::classify({"RSA", "2048", "none", "SHA256"}), MisuseClass::M1A);
  EXPECT_EQ(guard::classify({"RSA", "2048", "PKCS1", "SHA256"}), MisuseClass::M1A);
  EXPECT_EQ(guard::classify({"RSA", "2048", "OAEP", "SHA256"}), std::nullopt);
}

TEST(Guard, CheckOrderIsAlgorithmSizeModeHash) {
  EXPECT_EQ(guard::classify({"RC4", "8", "ECB", "MD5"}), MisuseClass::M3S);
  EXPECT_EQ(guard::classify({"AES", "8", "ECB", "MD5"}), MisuseClass::M1K);
  EXPECT_EQ(guard::classify({"AES", "128", "ECB", "MD5"}), MisuseClass::M1S);
  EXPECT_EQ(guard::classify({"RSA", "1024", "none", "SHA1"}), MisuseClass::M1K);
}

TEST(Guard, CheckAgreesWithClassify) {
  const KeySpec specs[] = {{"AES", "256", "GCM", "SHA256"}, {"DES", "56", "CBC", "SHA256"},
                           {"AES", "100", "GCM", "SHA256"}, {"3DES", "192", "CTR", "SHA256"},
                           {"ChaCha20", "256", "GCM", "SHA256"}, {"HMAC", "256", "none", "SHA1"}};
  for (const auto& s : specs) {
    EXPECT_EQ(thrown(s), guard::classify(s)) << s.algorithm << " " << s.mode;
    EXPECT_EQ(guard::classify(s), guard::classify(s));
  }
}

TEST(Guard, SizeWhitelists) {
  auto ok = [](const char* a, const char* size, const char* mode) {
    return !guard::classify({a, size, mode, "SHA256"}).has_value();
  };
  for (const char* s : {"128", "192", "256"}) EXPECT_TRUE(ok("AES", s, "GCM"));
  for (const char* s : {"64", "112", "160", "257", "0256", "+256", " 256", "256.0", "2e2"}) EXPECT_FALSE(ok("AES", s, "GCM")) << s;
  for (const char* s : {"256", "384", "512"}) EXPECT_TRUE(ok("AES", s, "SIV"));
  EXPECT_FALSE(ok("AES", "128", "SIV"));
  EXPECT_TRUE(ok("Blowfish", "128", "CBC"));
  EXPECT_TRUE(ok("Blowfish", "448", "CFB"));
  EXPECT_FALSE(ok("Blowfish", "120", "CBC"));
  EXPECT_FALSE(ok("Blowfish", "132", "CBC"));
  EXPECT_TRUE(ok("3DES", "192", "CBC"));
  EXPECT_FALSE(ok("3DES", "128", "CBC"));
  EXPECT_TRUE(ok("Salsa20", "256", "none"));
  EXPECT_FALSE(ok("ChaCha20", "128", "none"));
  EXPECT_TRUE(ok("HMAC", "128", "none"));
  EXPECT_TRUE(ok("HMAC", "512", "none"));
  EXPECT_FALSE(ok("HMAC", "64", "none"));
  for (const char* s : {"2048", "3072", "4096"}) {
    EXPECT_TRUE(ok("RSA", s, "OAEP"));
    EXPECT_TRUE(ok("DSA", s, "none"));
  }
  EXPECT_FALSE(ok("RSA", "1024", "OAEP"));
  EXPECT_TRUE(ok("ECDSA", "P-256", "none"));
  EXPECT_TRUE(ok("ECDSA", "p-384", "none"));
  EXPECT_FALSE(ok("ECDSA", "P-192", "none"));
  for (const char* g : {"modp-2048", "modp-3072", "modp-4096", "rfc5114-2048-224", "rfc5114-2048-256"})
    EXPECT_TRUE(ok("DH", g, "none")) << g;
  EXPECT_FALSE(ok("DH", "modp-1024", "none"));
}

TEST(Guard, ModeWhitelists) {
  for (Mode m : {Mode::cbc, Mode::ctr, Mode::cfb, Mode::eax, Mode::gcm, Mode::ccm, Mode::siv, Mode::ocb})
    EXPECT_TRUE(guard::is_allowed_mode(Algorithm::aes, m));
  EXPECT_FALSE(guard::is_allowed_mode(Algorithm::aes, Mode::none));
  for (Algorithm a : {Algorithm::blowfish, Algorithm::triple_des}) {
    EXPECT_EQ(guard::allowed_modes(a), (std::vector<Mode>{Mode::cbc, Mode::cfb}));
  }
  EXPECT_EQ(guard::allowed_modes(Algorithm::rsa), std::vector<Mode>{Mode::oaep});
  for (Algorithm a : {Algorithm::salsa20, Algorithm::chacha20, Algorithm::hmac, Algorithm::dsa, Algorithm::ecdsa,
                      Algorithm::dh})
    EXPECT_EQ(guard::allowed_modes(a), std::vector<Mode>{Mode::none});
  EXPECT_EQ(guard::classify({"Blowfish", "128", "GCM", "SHA256"}), MisuseClass::M1S);
  EXPECT_EQ(guard::classify({"ECDSA", "P-256", "OAEP", "SHA256"}), MisuseClass::M1S);
}

TEST(Guard, Hashes) {
  for (const char* h : {"SHA224", "SHA256", "SHA384", "SHA512", "sha512"})
    EXPECT_FALSE(guard::classify({"HMAC", "256", "none", h}).has_value()) << h;
  for (const char* h : {"MD2", "MD4", "MD5", "SHA1", "SHA-1", "RIPEMD160", ""})
    EXPECT_EQ(guard::classify({"HMAC", "256", "none", h}), MisuseClass::M1H) << h;
}

TEST(Guard, ObsoleteAndUnknownAlgorithms) {
  for (const char* a : {"DES", "RC4", "rc2", "IDEA", "Skipjack", "NotACipher", ""})
    EXPECT_EQ(guard::classify({a, "128", "CBC", "SHA256"}), MisuseClass::M3S) << a;
  EXPECT_TRUE(guard::is_obsolete_algorithm("des"));
  EXPECT_FALSE(guard::is_obsolete_algorithm("NotACipher"));
}

TEST(Guard, CheckLabels) {
  EXPECT_NO_THROW(guard::check_labels(Algorithm::aes, "256", Mode::gcm, Hash::sha256));
  EXPECT_THROW(guard::check_labels(Algorithm::aes, "64", Mode::gcm, Hash::sha256), MisuseError);
  EXPECT_THROW(guard::check_labels(Algorithm::rsa, "2048", Mode::none, Hash::sha256), MisuseError);
  EXPECT_THROW(guard::check_labels(Algorithm::blowfish, "128", Mode::ctr, Hash::sha256), MisuseError);
}

TEST(Guard, MisuseMessageCarriesCode) {
  try {
    guard::check_key_spec({"AES", "64", "GCM", "SHA256"});
    FAIL();
  } catch (const MisuseError& e) {
    EXPECT_EQ(e.misuse(), MisuseClass::M1K);
    EXPECT_EQ(std::string(e.what()).rfind("M1K (Insufficient key size)", 0), 0u) << e.what();
  }
}

TEST(Guard, AuditReport) {
  auto rows = guard::audit_report();
  ASSERT_EQ(rows.size(), 7u);
  const MisuseClass order[] = {MisuseClass::M1K, MisuseClass::M2K, MisuseClass::M1S, MisuseClass::M2S,
                               MisuseClass::M3S, MisuseClass::M1A, MisuseClass::M1H};
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].misuse, order[i]);
  auto row = [&](MisuseClass c) {
    for (auto& r : rows)
      if (r.misuse == c) return r;
    return rows[0];
  };
  EXPECT_NE(row(MisuseClass::M1S).prevention.find("whitelist of approved block modes"), std::string::npos);
  EXPECT_NE(row(MisuseClass::M2S).enforcement.find("IV generation"), std::string::npos);
  EXPECT_TRUE(row(MisuseClass::M2S).structural);
  EXPECT_FALSE(row(MisuseClass::M1K).structural);
}
