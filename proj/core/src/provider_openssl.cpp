#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/crypto.h>
#include <openssl/dsa.h>
#include <openssl/ec.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/provider.h>
#include <openssl/rand.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>
#include <sodium.h>

#include <array>
#include <cstring>
#include <map>
#include <mutex>
#include <random>

#include "provider_internal.hpp"
#include "secalgo/error.hpp"

namespace secalgo::provider {

namespace {

template <class T, void (*F)(T*)>
struct Deleter {
  void operator()(T* p) const { F(p); }
};

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, Deleter<EVP_CIPHER_CTX, EVP_CIPHER_CTX_free>>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, Deleter<EVP_MD_CTX, EVP_MD_CTX_free>>;
using PkeyCtx = std::unique_ptr<EVP_PKEY_CTX, Deleter<EVP_PKEY_CTX, EVP_PKEY_CTX_free>>;
using Pkey = std::unique_ptr<EVP_PKEY, Deleter<EVP_PKEY, EVP_PKEY_free>>;
using MacCtx = std::unique_ptr<EVP_MAC_CTX, Deleter<EVP_MAC_CTX, EVP_MAC_CTX_free>>;
using BnCtx = std::unique_ptr<BN_CTX, Deleter<BN_CTX, BN_CTX_free>>;
using Bn = std::unique_ptr<BIGNUM, Deleter<BIGNUM, BN_clear_free>>;
using EcdsaSig = std::unique_ptr<ECDSA_SIG, Deleter<ECDSA_SIG, ECDSA_SIG_free>>;
using DsaSig = std::unique_ptr<DSA_SIG, Deleter<DSA_SIG, DSA_SIG_free>>;

[[noreturn]] void fail(const std::string& what) {
  unsigned long code = ERR_get_error();
  std::string detail;
  if (code != 0) {
    char buf[256];
    ERR_error_string_n(code, buf, sizeof buf);
    detail = std::string(": ") + buf;
  }
  ERR_clear_error();
  throw Error("openssl: " + what + detail);
}

void ensure(int ok, const char* what) {
  if (ok <= 0) fail(what);
}

// Blowfish lives in the legacy provider; loading it explicitly also requires
// loading the default provider again.
void init_backends() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (!OSSL_PROVIDER_load(nullptr, "legacy")) fail("cannot load the legacy provider");
    if (!OSSL_PROVIDER_load(nullptr, "default")) fail("cannot load the default provider");
    if (sodium_init() < 0) throw Error("libsodium initialisation failed");
  });
}

const EVP_CIPHER* fetch_cipher(const std::string& cipher_name) {
  static std::mutex m;
  static std::map<std::string, EVP_CIPHER*> cache;
  std::lock_guard lock(m);
  auto it = cache.find(cipher_name);
  if (it != cache.end()) return it->second;
  EVP_CIPHER* c = EVP_CIPHER_fetch(nullptr, cipher_name.c_str(), nullptr);
  if (!c) fail("cipher " + cipher_name + " unavailable");
  cache.emplace(cipher_name, c);
  return c;
}

const EVP_MD* fetch_md(Hash h) {
  static std::once_flag once;
  static std::array<EVP_MD*, 5> mds{};
  std::call_once(once, [] {
    mds[static_cast<int>(Hash::sha224)] = EVP_MD_fetch(nullptr, "SHA224", nullptr);
    mds[static_cast<int>(Hash::sha256)] = EVP_MD_fetch(nullptr, "SHA256", nullptr);
    mds[static_cast<int>(Hash::sha384)] = EVP_MD_fetch(nullptr, "SHA384", nullptr);
    mds[static_cast<int>(Hash::sha512)] = EVP_MD_fetch(nullptr, "SHA512", nullptr);
  });
  EVP_MD* md = mds[static_cast<int>(h)];
  if (!md) fail("digest unavailable");
  return md;
}

const char* md_name(Hash h) {
  switch (h) {
    case Hash::sha224: return "SHA224";
    case Hash::sha256: return "SHA256";
    case Hash::sha384: return "SHA384";
    case Hash::sha512: return "SHA512";
  }
  return "SHA256";
}

std::string mode_suffix(Mode m) {
  switch (m) {
    case Mode::cbc: return "CBC";
    case Mode::ctr: return "CTR";
    case Mode::cfb: return "CFB";
    case Mode::gcm: return "GCM";
    case Mode::ccm: return "CCM";
    case Mode::ocb: return "OCB";
    default: throw Error("mode has no direct cipher");
  }
}

std::string cipher_name(Algorithm a, Mode m, std::size_t key_bytes) {
  switch (a) {
    case Algorithm::aes:
      if (m == Mode::siv) return "AES-" + std::to_string(key_bytes * 4) + "-SIV";
      return "AES-" + std::to_string(key_bytes * 8) + "-" + mode_suffix(m);
    case Algorithm::blowfish:
      if (m == Mode::cbc) return "BF-CBC";
      if (m == Mode::cfb) return "BF-CFB";
      break;
    case Algorithm::triple_des:
      if (m == Mode::cbc) return "DES-EDE3-CBC";
      if (m == Mode::cfb) return "DES-EDE3-CFB";
      break;
    default:
      break;
  }
  throw Error("no cipher for " + std::string(name(a)) + "-" + std::string(name(m)));
}

int to_int(std::size_t n) {
  if (n > static_cast<std::size_t>(INT32_MAX)) throw Error("input too large");
  return static_cast<int>(n);
}

// Plain (unauthenticated) cipher pass with padding disabled.
Bytes run_cipher(const EVP_CIPHER* cipher, bool variable_key, ByteView key, ByteView iv,
                 ByteView data, bool encrypt) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) fail("cipher context");
  ensure(EVP_CipherInit_ex2(ctx.get(), cipher, nullptr, nullptr, encrypt ? 1 : 0, nullptr), "cipher init");
  if (variable_key) ensure(EVP_CIPHER_CTX_set_key_length(ctx.get(), to_int(key.size())), "key length");
  if (static_cast<std::size_t>(EVP_CIPHER_CTX_get_key_length(ctx.get())) != key.size())
    throw Error("key length does not fit the cipher");
  if (static_cast<std::size_t>(EVP_CIPHER_CTX_get_iv_length(ctx.get())) != iv.size())
    throw Error("iv length does not fit the cipher");
  ensure(EVP_CipherInit_ex2(ctx.get(), nullptr, key.data(), iv.data(), encrypt ? 1 : 0, nullptr), "cipher key");
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  Bytes out(data.size() + 32);
  int len = 0, fin = 0;
  ensure(EVP_CipherUpdate(ctx.get(), out.data(), &len, data.data(), to_int(data.size())), "cipher update");
  ensure(EVP_CipherFinal_ex(ctx.get(), out.data() + len, &fin), "cipher final");
  out.resize(static_cast<std::size_t>(len + fin));
  return out;
}

// OMAC^t from EAX: CMAC over the t-th tweak block followed by the data.
Bytes omac(int t, ByteView key, ByteView data) {
  static EVP_MAC* cmac = [] {
    EVP_MAC* m = EVP_MAC_fetch(nullptr, "CMAC", nullptr);
    if (!m) fail("CMAC unavailable");
    return m;
  }();
  MacCtx ctx(EVP_MAC_CTX_new(cmac));
  if (!ctx) fail("mac context");
  std::string cbc = "AES-" + std::to_string(key.size() * 8) + "-CBC";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_CIPHER, cbc.data(), 0),
      OSSL_PARAM_construct_end(),
  };
  ensure(EVP_MAC_init(ctx.get(), key.data(), key.size(), params), "cmac init");
  if (t >= 0) {
    std::array<std::uint8_t, 16> tweak{};
    tweak[15] = static_cast<std::uint8_t>(t);
    ensure(EVP_MAC_update(ctx.get(), tweak.data(), tweak.size()), "cmac update");
  }
  ensure(EVP_MAC_update(ctx.get(), data.data(), data.size()), "cmac update");
  Bytes out(16);
  std::size_t n = 0;
  ensure(EVP_MAC_final(ctx.get(), out.data(), &n, out.size()), "cmac final");
  return out;
}

Bytes cmac(ByteView key, ByteView data) { return omac(-1, key, data); }

// Doubling in GF(2^128) as used by S2V.
Bytes dbl(ByteView in) {
  Bytes out(16);
  std::uint8_t carry = 0;
  for (int i = 15; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>((in[i] << 1) | carry);
    carry = in[i] >> 7;
  }
  if (in[0] & 0x80) out[15] ^= 0x87;
  return out;
}

// S2V over (ad, nonce, empty plaintext). OpenSSL's SIV never runs on an
// empty update, so the zero-length case is computed here.
Bytes siv_empty_tag(ByteView key, ByteView ad, ByteView nonce) {
  ByteView k1 = key.first(key.size() / 2);
  Bytes d = cmac(k1, Bytes(16, 0));
  for (ByteView s : {ad, nonce}) {
    Bytes m = cmac(k1, s);
    d = dbl(d);
    for (int i = 0; i < 16; ++i) d[i] ^= m[i];
  }
  Bytes t = dbl(d);
  t[0] ^= 0x80;
  return cmac(k1, t);
}

class OsslKey final : public AsymmetricKey {
 public:
  OsslKey(Pkey pkey, Algorithm a, bool has_private) : pkey_(std::move(pkey)), alg_(a), private_(has_private) {
    int id = EVP_PKEY_get_base_id(pkey_.get());
    int want = a == Algorithm::rsa ? EVP_PKEY_RSA : a == Algorithm::dsa ? EVP_PKEY_DSA : EVP_PKEY_EC;
    if (id != want) throw ParseError("key material is not a " + std::string(name(a)) + " key");
    int bits = EVP_PKEY_get_bits(pkey_.get());
    switch (a) {
      case Algorithm::rsa:
        size_ = std::to_string(bits);
        modulus_bytes_ = static_cast<std::size_t>(EVP_PKEY_get_size(pkey_.get()));
        signature_bytes_ = modulus_bytes_;
        break;
      case Algorithm::dsa: {
        size_ = std::to_string(bits);
        BIGNUM* q = nullptr;
        if (!EVP_PKEY_get_bn_param(pkey_.get(), OSSL_PKEY_PARAM_FFC_Q, &q))
          throw ParseError("DSA key without subgroup order");
        signature_bytes_ = 2 * static_cast<std::size_t>(BN_num_bytes(q));
        BN_free(q);
        break;
      }
      default: {
        char group[64] = {0};
        std::size_t len = 0;
        if (!EVP_PKEY_get_utf8_string_param(pkey_.get(), OSSL_PKEY_PARAM_GROUP_NAME, group,
                                            sizeof group, &len))
          throw ParseError("EC key without a named curve");
        std::string g(group, len);
        if (g == "prime256v1" || g == "P-256") size_ = "P-256";
        else if (g == "secp384r1" || g == "P-384") size_ = "P-384";
        else size_ = g;
        signature_bytes_ = 2 * ((static_cast<std::size_t>(bits) + 7) / 8);
        break;
      }
    }
  }

  Algorithm algorithm() const override { return alg_; }
  bool has_private() const override { return private_; }
  std::string size() const override { return size_; }
  std::size_t modulus_bytes() const override { return modulus_bytes_; }
  std::size_t signature_bytes() const override { return signature_bytes_; }

  EVP_PKEY* pkey() const { return pkey_.get(); }

 private:
  Pkey pkey_;
  Algorithm alg_;
  bool private_;
  std::string size_;
  std::size_t modulus_bytes_ = 0;
  std::size_t signature_bytes_ = 0;
};

const OsslKey& as_ossl(const AsymmetricKey& k) {
  auto* p = dynamic_cast<const OsslKey*>(&k);
  if (!p) throw Error("key handle belongs to another provider");
  return *p;
}

Bytes der_private(EVP_PKEY* k) {
  int n = i2d_PrivateKey(k, nullptr);
  if (n <= 0) fail("private key encoding");
  Bytes out(static_cast<std::size_t>(n));
  unsigned char* p = out.data();
  i2d_PrivateKey(k, &p);
  return out;
}

Bytes der_public(EVP_PKEY* k) {
  int n = i2d_PUBKEY(k, nullptr);
  if (n <= 0) fail("public key encoding");
  Bytes out(static_cast<std::size_t>(n));
  unsigned char* p = out.data();
  i2d_PUBKEY(k, &p);
  return out;
}

// Fixed-width r||s <-> DER for DSA and ECDSA.
Bytes sig_to_fixed(Algorithm a, ByteView der, std::size_t width) {
  const unsigned char* p = der.data();
  const BIGNUM* r = nullptr;
  const BIGNUM* s = nullptr;
  EcdsaSig ec;
  DsaSig ds;
  if (a == Algorithm::ecdsa) {
    ec.reset(d2i_ECDSA_SIG(nullptr, &p, static_cast<long>(der.size())));
    if (!ec) fail("signature decoding");
    ECDSA_SIG_get0(ec.get(), &r, &s);
  } else {
    ds.reset(d2i_DSA_SIG(nullptr, &p, static_cast<long>(der.size())));
    if (!ds) fail("signature decoding");
    DSA_SIG_get0(ds.get(), &r, &s);
  }
  std::size_t half = width / 2;
  Bytes out(width);
  if (BN_bn2binpad(r, out.data(), static_cast<int>(half)) < 0 ||
      BN_bn2binpad(s, out.data() + half, static_cast<int>(half)) < 0)
    fail("signature width");
  return out;
}

std::optional<Bytes> sig_from_fixed(Algorithm a, ByteView fixed, std::size_t width) {
  if (fixed.size() != width) return std::nullopt;
  std::size_t half = width / 2;
  BIGNUM* r = BN_bin2bn(fixed.data(), static_cast<int>(half), nullptr);
  BIGNUM* s = BN_bin2bn(fixed.data() + half, static_cast<int>(half), nullptr);
  if (!r || !s) {
    BN_free(r);
    BN_free(s);
    fail("bignum");
  }
  unsigned char* der = nullptr;
  int n = 0;
  if (a == Algorithm::ecdsa) {
    EcdsaSig sig(ECDSA_SIG_new());
    ECDSA_SIG_set0(sig.get(), r, s);
    n = i2d_ECDSA_SIG(sig.get(), &der);
  } else {
    DsaSig sig(DSA_SIG_new());
    DSA_SIG_set0(sig.get(), r, s);
    n = i2d_DSA_SIG(sig.get(), &der);
  }
  if (n <= 0) fail("signature encoding");
  Bytes out(der, der + n);
  OPENSSL_free(der);
  return out;
}

// Deterministic stream behind RAND_bytes while a test seed is installed.
struct SeededStream {
  std::mutex mutex;
  std::mt19937_64 rng;
};

SeededStream& seeded_stream() {
  static SeededStream s;
  return s;
}

int seeded_bytes(unsigned char* buf, int num) {
  auto& st = seeded_stream();
  std::lock_guard lock(st.mutex);
  for (int i = 0; i < num; i += 8) {
    std::uint64_t v = st.rng();
    int n = std::min(8, num - i);
    std::memcpy(buf + i, &v, static_cast<std::size_t>(n));
  }
  return 1;
}

int seeded_status() { return 1; }

#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wdeprecated-declarations"
const RAND_METHOD kSeededMethod = {
    nullptr, seeded_bytes, nullptr, nullptr, seeded_bytes, seeded_status,
};
#pragma GCC diagnostic pop

class OpensslProvider final : public Provider {
 public:
  OpensslProvider() { init_backends(); }

  std::string_view name() const override { return "openssl"; }

  void random(std::span<std::uint8_t> out) override {
    if (out.empty()) return;
    ensure(RAND_bytes(out.data(), to_int(out.size())), "random");
  }

  void set_test_seed(std::optional<std::uint64_t> seed) override {
    #pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wdeprecated-declarations"
    std::lock_guard lock(seed_mutex_);
    if (seed) {
      {
        auto& st = seeded_stream();
        std::lock_guard l(st.mutex);
        st.rng.seed(*seed);
      }
      if (!seeded_) previous_method_ = RAND_get_rand_method();
      RAND_set_rand_method(&kSeededMethod);
      seeded_ = true;
    } else if (seeded_) {
      RAND_set_rand_method(previous_method_);
      seeded_ = false;
    }
    #pragma GCC diagnostic pop
  }

  Bytes digest(Hash h, ByteView data) override {
    Bytes out(EVP_MAX_MD_SIZE);
    unsigned int n = 0;
    ensure(EVP_Digest(data.data(), data.size(), out.data(), &n, fetch_md(h), nullptr), "digest");
    out.resize(n);
    return out;
  }

  Bytes hmac(Hash h, ByteView key, ByteView data) override {
    static const std::uint8_t kEmpty = 0;
    Bytes out(EVP_MAX_MD_SIZE);
    unsigned int n = 0;
    if (!HMAC(fetch_md(h), key.empty() ? &kEmpty : key.data(), to_int(key.size()), data.data(),
              data.size(), out.data(), &n))
      fail("hmac");
    out.resize(n);
    return out;
  }

  Bytes block_encrypt(Algorithm a, Mode m, ByteView key, ByteView iv, ByteView data) override {
    check_block_input(a, m, data);
    return run_cipher(fetch_cipher(cipher_name(a, m, key.size())), a == Algorithm::blowfish, key,
                      iv, data, true);
  }

  Bytes block_decrypt(Algorithm a, Mode m, ByteView key, ByteView iv, ByteView data) override {
    check_block_input(a, m, data);
    return run_cipher(fetch_cipher(cipher_name(a, m, key.size())), a == Algorithm::blowfish, key,
                      iv, data, false);
  }

  Sealed aead_seal(Algorithm a, Mode m, ByteView key, ByteView nonce, ByteView ad,
                   ByteView plaintext) override {
    if (a != Algorithm::aes) throw Error("AEAD modes need AES");
    if (m == Mode::eax) return eax_seal(key, nonce, ad, plaintext);
    if (m == Mode::siv) return siv_seal(key, nonce, ad, plaintext);

    const EVP_CIPHER* cipher = fetch_cipher(cipher_name(a, m, key.size()));
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    int len = 0;
    ensure(EVP_EncryptInit_ex2(ctx.get(), cipher, nullptr, nullptr, nullptr), "aead init");
    ensure(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_IVLEN, to_int(nonce.size()), nullptr), "ivlen");
    if (m == Mode::ccm || m == Mode::ocb)
      ensure(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, 16, nullptr), "tag length");
    ensure(EVP_EncryptInit_ex2(ctx.get(), nullptr, key.data(), nonce.data(), nullptr), "aead key");
    if (m == Mode::ccm)
      ensure(EVP_EncryptUpdate(ctx.get(), nullptr, &len, nullptr, to_int(plaintext.size())), "ccm length");
    if (!ad.empty()) ensure(EVP_EncryptUpdate(ctx.get(), nullptr, &len, ad.data(), to_int(ad.size())), "aad");
    Sealed s;
    s.ciphertext.resize(plaintext.size() + 16);
    int out = 0, fin = 0;
    // A null input reads as a length call under CCM, even for an empty message.
    static const std::uint8_t kEmpty = 0;
    ensure(EVP_EncryptUpdate(ctx.get(), s.ciphertext.data(), &out, plaintext.empty() ? &kEmpty : plaintext.data(),
                             to_int(plaintext.size())),
           "aead update");
    ensure(EVP_EncryptFinal_ex(ctx.get(), s.ciphertext.data() + out, &fin), "aead final");
    s.ciphertext.resize(static_cast<std::size_t>(out + fin));
    s.tag.resize(16);
    ensure(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, 16, s.tag.data()), "get tag");
    return s;
  }

  std::optional<Bytes> aead_open(Algorithm a, Mode m, ByteView key, ByteView nonce, ByteView ad,
                                 ByteView ciphertext, ByteView tag) override {
    if (a != Algorithm::aes) throw Error("AEAD modes need AES");
    if (tag.size() != 16) return std::nullopt;
    if (m == Mode::eax) return eax_open(key, nonce, ad, ciphertext, tag);
    if (m == Mode::siv) return siv_open(key, nonce, ad, ciphertext, tag);

    const EVP_CIPHER* cipher = fetch_cipher(cipher_name(a, m, key.size()));
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    int len = 0;
    Bytes tag_copy(tag.begin(), tag.end());
    ensure(EVP_DecryptInit_ex2(ctx.get(), cipher, nullptr, nullptr, nullptr), "aead init");
    ensure(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_IVLEN, to_int(nonce.size()), nullptr), "ivlen");
    if (m == Mode::ccm || m == Mode::ocb)
      ensure(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, 16, tag_copy.data()), "set tag");
    ensure(EVP_DecryptInit_ex2(ctx.get(), nullptr, key.data(), nonce.data(), nullptr), "aead key");
    if (m == Mode::ccm)
      ensure(EVP_DecryptUpdate(ctx.get(), nullptr, &len, nullptr, to_int(ciphertext.size())), "ccm length");
    if (!ad.empty()) ensure(EVP_DecryptUpdate(ctx.get(), nullptr, &len, ad.data(), to_int(ad.size())), "aad");
    Bytes out(ciphertext.size() + 16);
    int n = 0, fin = 0;
    static const std::uint8_t kEmpty = 0;
    int ok = EVP_DecryptUpdate(ctx.get(), out.data(), &n, ciphertext.empty() ? &kEmpty : ciphertext.data(),
                               to_int(ciphertext.size()));
    if (m == Mode::ccm) {
      ERR_clear_error();
      if (ok <= 0) return std::nullopt;
      out.resize(static_cast<std::size_t>(n));
      return out;
    }
    if (ok <= 0) {
      ERR_clear_error();
      return std::nullopt;
    }
    if (m == Mode::gcm)
      ensure(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, 16, tag_copy.data()), "set tag");
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + n, &fin) <= 0) {
      ERR_clear_error();
      return std::nullopt;
    }
    out.resize(static_cast<std::size_t>(n + fin));
    return out;
  }

  Bytes stream_xor(Algorithm a, ByteView key, ByteView nonce, ByteView data) override {
    if (key.size() != 32) throw Error("stream ciphers take 256-bit keys");
    Bytes out(data.size());
    if (data.empty()) return out;
    if (a == Algorithm::salsa20) {
      if (nonce.size() != crypto_stream_salsa20_NONCEBYTES) throw Error("Salsa20 nonce length");
      crypto_stream_salsa20_xor(out.data(), data.data(), data.size(), nonce.data(), key.data());
    } else if (a == Algorithm::chacha20) {
      if (nonce.size() != crypto_stream_chacha20_ietf_NONCEBYTES) throw Error("ChaCha20 nonce length");
      crypto_stream_chacha20_ietf_xor(out.data(), data.data(), data.size(), nonce.data(), key.data());
    } else {
      throw Error("not a stream cipher");
    }
    return out;
  }

  GeneratedKeyPair generate_keypair(Algorithm a, std::string_view size) override {
    Pkey pkey;
    EVP_PKEY* raw = nullptr;
    if (a == Algorithm::rsa) {
      PkeyCtx ctx(EVP_PKEY_CTX_new_from_name(nullptr, "RSA", nullptr));
      ensure(ctx && EVP_PKEY_keygen_init(ctx.get()), "rsa keygen init");
      ensure(EVP_PKEY_CTX_set_rsa_keygen_bits(ctx.get(), std::stoi(std::string(size))), "rsa bits");
      ensure(EVP_PKEY_keygen(ctx.get(), &raw), "rsa keygen");
    } else if (a == Algorithm::dsa) {
      PkeyCtx pctx(EVP_PKEY_CTX_new_from_name(nullptr, "DSA", nullptr));
      ensure(pctx && EVP_PKEY_paramgen_init(pctx.get()), "dsa paramgen init");
      ensure(EVP_PKEY_CTX_set_dsa_paramgen_bits(pctx.get(), std::stoi(std::string(size))), "dsa bits");
      ensure(EVP_PKEY_CTX_set_dsa_paramgen_q_bits(pctx.get(), 256), "dsa q bits");
      EVP_PKEY* params = nullptr;
      ensure(EVP_PKEY_paramgen(pctx.get(), &params), "dsa paramgen");
      Pkey p(params);
      PkeyCtx kctx(EVP_PKEY_CTX_new_from_pkey(nullptr, params, nullptr));
      ensure(kctx && EVP_PKEY_keygen_init(kctx.get()), "dsa keygen init");
      ensure(EVP_PKEY_keygen(kctx.get(), &raw), "dsa keygen");
    } else if (a == Algorithm::ecdsa) {
      std::string curve(size);
      PkeyCtx ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
      ensure(ctx && EVP_PKEY_keygen_init(ctx.get()), "ec keygen init");
      ensure(EVP_PKEY_CTX_set_group_name(ctx.get(), curve.c_str()), "ec curve");
      ensure(EVP_PKEY_keygen(ctx.get(), &raw), "ec keygen");
    } else {
      throw Error("no key pair generation for " + std::string(secalgo::name(a)));
    }
    pkey.reset(raw);

    GeneratedKeyPair out;
    out.private_der = der_private(pkey.get());
    out.public_der = der_public(pkey.get());
    out.private_key = std::make_shared<OsslKey>(std::move(pkey), a, true);
    out.public_key = load_public(a, out.public_der);
    return out;
  }

  KeyHandle load_private(Algorithm a, ByteView der) override {
    const unsigned char* p = der.data();
    Pkey k(d2i_AutoPrivateKey(nullptr, &p, static_cast<long>(der.size())));
    if (!k || p != der.data() + der.size()) {
      ERR_clear_error();
      throw ParseError("malformed private key material");
    }
    return std::make_shared<OsslKey>(std::move(k), a, true);
  }

  KeyHandle load_public(Algorithm a, ByteView der) override {
    const unsigned char* p = der.data();
    Pkey k(d2i_PUBKEY(nullptr, &p, static_cast<long>(der.size())));
    if (!k || p != der.data() + der.size()) {
      ERR_clear_error();
      throw ParseError("malformed public key material");
    }
    return std::make_shared<OsslKey>(std::move(k), a, false);
  }

  Bytes public_der(const AsymmetricKey& key) override { return der_public(as_ossl(key).pkey()); }

  Bytes oaep_encrypt(const AsymmetricKey& pub, ByteView data) override {
    PkeyCtx ctx = oaep_ctx(pub, true);
    std::size_t n = 0;
    ensure(EVP_PKEY_encrypt(ctx.get(), nullptr, &n, data.data(), data.size()), "oaep size");
    Bytes out(n);
    ensure(EVP_PKEY_encrypt(ctx.get(), out.data(), &n, data.data(), data.size()), "oaep encrypt");
    out.resize(n);
    return out;
  }

  std::optional<Bytes> oaep_decrypt(const AsymmetricKey& priv, ByteView data) override {
    PkeyCtx ctx = oaep_ctx(priv, false);
    std::size_t n = priv.modulus_bytes();
    Bytes out(n);
    if (EVP_PKEY_decrypt(ctx.get(), out.data(), &n, data.data(), data.size()) <= 0) {
      ERR_clear_error();
      return std::nullopt;
    }
    out.resize(n);
    return out;
  }

  Bytes sign(const AsymmetricKey& priv, Hash h, ByteView data) override {
    const OsslKey& k = as_ossl(priv);
    MdCtx ctx(EVP_MD_CTX_new());
    ensure(EVP_DigestSignInit_ex(ctx.get(), nullptr, md_name(h), nullptr, nullptr, k.pkey(), nullptr),
           "sign init");
    std::size_t n = 0;
    ensure(EVP_DigestSign(ctx.get(), nullptr, &n, data.data(), data.size()), "sign size");
    Bytes sig(n);
    ensure(EVP_DigestSign(ctx.get(), sig.data(), &n, data.data(), data.size()), "sign");
    sig.resize(n);
    if (k.algorithm() == Algorithm::rsa) return sig;
    return sig_to_fixed(k.algorithm(), sig, k.signature_bytes());
  }

  bool verify(const AsymmetricKey& pub, Hash h, ByteView data, ByteView sig) override {
    const OsslKey& k = as_ossl(pub);
    Bytes der;
    ByteView s = sig;
    if (k.algorithm() != Algorithm::rsa) {
      auto d = sig_from_fixed(k.algorithm(), sig, k.signature_bytes());
      if (!d) return false;
      der = std::move(*d);
      s = der;
    } else if (sig.size() != k.signature_bytes()) {
      return false;
    }
    MdCtx ctx(EVP_MD_CTX_new());
    ensure(EVP_DigestVerifyInit_ex(ctx.get(), nullptr, md_name(h), nullptr, nullptr, k.pkey(), nullptr),
           "verify init");
    int ok = EVP_DigestVerify(ctx.get(), s.data(), s.size(), data.data(), data.size());
    ERR_clear_error();
    return ok == 1;
  }

  Bytes mod_exp(ByteView base, ByteView exponent, ByteView modulus) override {
    BnCtx ctx(BN_CTX_new());
    Bn b(BN_bin2bn(base.data(), to_int(base.size()), nullptr));
    Bn e(BN_bin2bn(exponent.data(), to_int(exponent.size()), nullptr));
    Bn m(BN_bin2bn(modulus.data(), to_int(modulus.size()), nullptr));
    Bn r(BN_new());
    if (!ctx || !b || !e || !m || !r) fail("bignum allocation");
    BN_set_flags(e.get(), BN_FLG_CONSTTIME);
    ensure(BN_mod_exp_mont_consttime(r.get(), b.get(), e.get(), m.get(), ctx.get(), nullptr), "mod exp");
    Bytes out(modulus.size());
    if (BN_bn2binpad(r.get(), out.data(), to_int(out.size())) < 0) fail("mod exp width");
    return out;
  }

 private:
  static void check_block_input(Algorithm a, Mode m, ByteView data) {
    if (m == Mode::cbc && data.size() % block_size(a) != 0) throw Error("CBC input is not block aligned");
    if (m == Mode::ctr && a != Algorithm::aes) throw Error("CTR is offered for AES only");
  }

  static PkeyCtx oaep_ctx(const AsymmetricKey& key, bool encrypt) {
    const OsslKey& k = as_ossl(key);
    if (k.algorithm() != Algorithm::rsa) throw Error("OAEP needs an RSA key");
    PkeyCtx ctx(EVP_PKEY_CTX_new_from_pkey(nullptr, k.pkey(), nullptr));
    if (!ctx) fail("pkey context");
    ensure(encrypt ? EVP_PKEY_encrypt_init(ctx.get()) : EVP_PKEY_decrypt_init(ctx.get()), "oaep init");
    ensure(EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_PKCS1_OAEP_PADDING), "oaep padding");
    ensure(EVP_PKEY_CTX_set_rsa_oaep_md_name(ctx.get(), "SHA256", nullptr), "oaep hash");
    ensure(EVP_PKEY_CTX_set_rsa_mgf1_md_name(ctx.get(), "SHA256", nullptr), "mgf1 hash");
    return ctx;
  }

  Sealed eax_seal(ByteView key, ByteView nonce, ByteView ad, ByteView pt) {
    Bytes n = omac(0, key, nonce);
    Bytes h = omac(1, key, ad);
    Sealed s;
    s.ciphertext = run_cipher(fetch_cipher(cipher_name(Algorithm::aes, Mode::ctr, key.size())), false,
                              key, n, pt, true);
    Bytes c = omac(2, key, s.ciphertext);
    s.tag.resize(16);
    for (int i = 0; i < 16; ++i) s.tag[i] = n[i] ^ h[i] ^ c[i];
    return s;
  }

  std::optional<Bytes> eax_open(ByteView key, ByteView nonce, ByteView ad, ByteView ct, ByteView tag) {
    Bytes n = omac(0, key, nonce);
    Bytes h = omac(1, key, ad);
    Bytes c = omac(2, key, ct);
    Bytes expect(16);
    for (int i = 0; i < 16; ++i) expect[i] = n[i] ^ h[i] ^ c[i];
    if (CRYPTO_memcmp(expect.data(), tag.data(), 16) != 0) return std::nullopt;
    return run_cipher(fetch_cipher(cipher_name(Algorithm::aes, Mode::ctr, key.size())), false, key, n,
                      ct, false);
  }

  Sealed siv_seal(ByteView key, ByteView nonce, ByteView ad, ByteView pt) {
    if (pt.empty()) return {Bytes{}, siv_empty_tag(key, ad, nonce)};
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    int len = 0;
    ensure(EVP_EncryptInit_ex2(ctx.get(), fetch_cipher(cipher_name(Algorithm::aes, Mode::siv, key.size())),
                               key.data(), nullptr, nullptr),
           "siv init");
    ensure(EVP_EncryptUpdate(ctx.get(), nullptr, &len, ad.data(), to_int(ad.size())), "siv ad");
    ensure(EVP_EncryptUpdate(ctx.get(), nullptr, &len, nonce.data(), to_int(nonce.size())), "siv nonce");
    Sealed s;
    s.ciphertext.resize(pt.size());
    int fin = 0;
    ensure(EVP_EncryptUpdate(ctx.get(), s.ciphertext.data(), &len, pt.data(), to_int(pt.size())), "siv update");
    ensure(EVP_EncryptFinal_ex(ctx.get(), s.ciphertext.data() + len, &fin), "siv final");
    s.tag.resize(16);
    ensure(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, 16, s.tag.data()), "siv tag");
    return s;
  }

  std::optional<Bytes> siv_open(ByteView key, ByteView nonce, ByteView ad, ByteView ct, ByteView tag) {
    if (ct.empty()) {
      Bytes expect = siv_empty_tag(key, ad, nonce);
      if (CRYPTO_memcmp(expect.data(), tag.data(), 16) != 0) return std::nullopt;
      return Bytes{};
    }
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    int len = 0;
    Bytes tag_copy(tag.begin(), tag.end());
    ensure(EVP_DecryptInit_ex2(ctx.get(), fetch_cipher(cipher_name(Algorithm::aes, Mode::siv, key.size())),
                               key.data(), nullptr, nullptr),
           "siv init");
    ensure(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, 16, tag_copy.data()), "siv tag");
    ensure(EVP_DecryptUpdate(ctx.get(), nullptr, &len, ad.data(), to_int(ad.size())), "siv ad");
    ensure(EVP_DecryptUpdate(ctx.get(), nullptr, &len, nonce.data(), to_int(nonce.size())), "siv nonce");
    Bytes out(ct.size());
    int fin = 0;
    if (EVP_DecryptUpdate(ctx.get(), out.data(), &len, ct.data(), to_int(ct.size())) <= 0 ||
        EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) <= 0) {
      ERR_clear_error();
      return std::nullopt;
    }
    out.resize(static_cast<std::size_t>(len + fin));
    return out;
  }

  std::mutex seed_mutex_;
  bool seeded_ = false;
  const RAND_METHOD* previous_method_ = nullptr;
};

}  // namespace

std::unique_ptr<Provider> make_openssl_provider() { return std::make_unique<OpensslProvider>(); }

}  // namespace secalgo::provider
