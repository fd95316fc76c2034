#include "secalgo/guard.hpp"

#include <algorithm>
#include <array>
#include <initializer_list>

namespace secalgo::guard {

namespace {

constexpr std::array<std::string_view, 13> kObsolete{
    "DES", "DESX", "2DES", "RC2", "RC4", "RC5", "ARC2", "ARC4", "IDEA", "CAST5", "CAST", "Skipjack",
    "TEA",
};

constexpr std::array<std::string_view, 5> kDhGroups{
    "modp-2048", "modp-3072", "modp-4096", "rfc5114-2048-224", "rfc5114-2048-256",
};

std::vector<std::string> range_bits(int lo, int hi, int step) {
  std::vector<std::string> out;
  for (int b = lo; b <= hi; b += step) out.push_back(std::to_string(b));
  return out;
}

// Decimal without sign or leading zeros, so every size has one spelling.
std::optional<int> strict_int(std::string_view s) {
  if (s.empty() || s.size() > 6 || s[0] == '0') return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

std::string describe(const KeySpec& s) {
  return "algorithm=" + s.algorithm + " size=" + s.size + " mode=" + s.mode + " hash=" + s.hash;
}

}  // namespace

bool is_obsolete_algorithm(std::string_view name) {
  return std::any_of(kObsolete.begin(), kObsolete.end(),
                     [&](std::string_view o) { return iequals(o, name); });
}

std::vector<std::string> allowed_sizes(Algorithm a, Mode m) {
  switch (a) {
    case Algorithm::aes:
      // SIV keys carry two AES keys.
      if (m == Mode::siv) return {"256", "384", "512"};
      return {"128", "192", "256"};
    case Algorithm::blowfish:
      return range_bits(128, 448, 8);
    case Algorithm::triple_des:
      return {"192"};
    case Algorithm::salsa20:
    case Algorithm::chacha20:
      return {"256"};
    case Algorithm::hmac:
      return range_bits(128, 512, 8);
    case Algorithm::rsa:
    case Algorithm::dsa:
      return {"2048", "3072", "4096"};
    case Algorithm::ecdsa:
      return {"P-256", "P-384"};
    case Algorithm::dh:
      return {kDhGroups.begin(), kDhGroups.end()};
  }
  return {};
}

std::vector<Mode> allowed_modes(Algorithm a) {
  switch (a) {
    case Algorithm::aes:
      return {Mode::cbc, Mode::ctr, Mode::cfb, Mode::eax, Mode::gcm, Mode::ccm, Mode::siv, Mode::ocb};
    case Algorithm::blowfish:
    case Algorithm::triple_des:
      // 64-bit blocks: no room for an 8-byte random counter half, and no
      // 64-bit AEAD constructions are offered.
      return {Mode::cbc, Mode::cfb};
    case Algorithm::rsa:
      return {Mode::oaep};
    default:
      return {Mode::none};
  }
}

std::vector<Hash> allowed_hashes() { return {Hash::sha224, Hash::sha256, Hash::sha384, Hash::sha512}; }

// Non-allocating: this runs on every primitive call.
bool is_allowed_size(Algorithm a, Mode m, std::string_view size) {
  auto bits = strict_int(size);
  auto in_range = [&](int lo, int hi, int step) {
    return bits && *bits >= lo && *bits <= hi && (*bits - lo) % step == 0;
  };
  auto one_of = [&](std::initializer_list<int> v) {
    return bits && std::find(v.begin(), v.end(), *bits) != v.end();
  };
  switch (a) {
    case Algorithm::aes:
      return m == Mode::siv ? one_of({256, 384, 512}) : one_of({128, 192, 256});
    case Algorithm::blowfish:
      return in_range(128, 448, 8);
    case Algorithm::triple_des:
      return one_of({192});
    case Algorithm::salsa20:
    case Algorithm::chacha20:
      return one_of({256});
    case Algorithm::hmac:
      return in_range(128, 512, 8);
    case Algorithm::rsa:
    case Algorithm::dsa:
      return one_of({2048, 3072, 4096});
    case Algorithm::ecdsa:
      return iequals(size, "P-256") || iequals(size, "P-384");
    case Algorithm::dh:
      return std::any_of(kDhGroups.begin(), kDhGroups.end(),
                         [&](std::string_view g) { return iequals(g, size); });
  }
  return false;
}

bool is_allowed_mode(Algorithm a, Mode m) {
  switch (a) {
    case Algorithm::aes:
      return m != Mode::none && m != Mode::oaep;
    case Algorithm::blowfish:
    case Algorithm::triple_des:
      return m == Mode::cbc || m == Mode::cfb;
    case Algorithm::rsa:
      return m == Mode::oaep;
    default:
      return m == Mode::none;
  }
}

std::string default_size(Algorithm a, Mode m) {
  switch (a) {
    case Algorithm::aes:
      return m == Mode::siv ? "512" : "256";
    case Algorithm::triple_des:
      return "192";
    case Algorithm::rsa:
    case Algorithm::dsa:
      return "2048";
    case Algorithm::ecdsa:
      return "P-256";
    case Algorithm::dh:
      return "modp-2048";
    default:
      return "256";
  }
}

Mode default_mode(Algorithm a) {
  switch (a) {
    case Algorithm::aes:
      return Mode::gcm;
    case Algorithm::blowfish:
    case Algorithm::triple_des:
      return Mode::cbc;
    case Algorithm::rsa:
      return Mode::oaep;
    default:
      return Mode::none;
  }
}

std::optional<MisuseClass> classify(const KeySpec& spec) {
  auto alg = parse_algorithm(spec.algorithm);
  if (!alg) return MisuseClass::M3S;

  auto mode = parse_mode(spec.mode);
  if (!is_allowed_size(*alg, mode.value_or(Mode::none), spec.size)) return MisuseClass::M1K;

  if (!mode || !is_allowed_mode(*alg, *mode))
    return *alg == Algorithm::rsa ? MisuseClass::M1A : MisuseClass::M1S;

  if (!parse_hash(spec.hash)) return MisuseClass::M1H;
  return std::nullopt;
}

void check_key_spec(const KeySpec& spec) {
  if (auto c = classify(spec)) throw MisuseError(*c, describe(spec));
}

void check_labels(Algorithm a, std::string_view size, Mode m, Hash h) {
  if (is_allowed_size(a, m, size) && is_allowed_mode(a, m)) return;
  check_key_spec({std::string(name(a)), std::string(size), std::string(name(m)), std::string(name(h))});
}

std::vector<AuditRow> audit_report() {
  return {
      {MisuseClass::M1K, std::string(description(MisuseClass::M1K)),
       "key sizes below 112-bit security are excluded from the key size whitelist",
       "guard size whitelist at keygen, key import and every primitive call", false},
      {MisuseClass::M2K, std::string(description(MisuseClass::M2K)),
       "keys come only from keygen, which draws material from the provider's random source",
       "enforced by keygen randomness", false},
      {MisuseClass::M1S, std::string(description(MisuseClass::M1S)),
       "ECB is excluded from the whitelist of approved block modes",
       "guard mode whitelist at config, keygen, key import and every primitive call", false},
      {MisuseClass::M2S, std::string(description(MisuseClass::M2S)),
       "encrypt generates a random IV, nonce or counter prefix on every call; callers cannot supply one",
       "enforced structurally by encrypt's IV generation", true},
      {MisuseClass::M3S, std::string(description(MisuseClass::M3S)),
       "obsolete ciphers such as DES and RC4 are excluded from the algorithm whitelist",
       "guard algorithm whitelist at config, keygen, key import and every primitive call", false},
      {MisuseClass::M1A, std::string(description(MisuseClass::M1A)),
       "RSA encryption always uses OAEP; no other padding path exists",
       "enforced structurally by the OAEP-only RSA path in encrypt", true},
      {MisuseClass::M1H, std::string(description(MisuseClass::M1H)),
       "MD2, MD4, MD5 and SHA-1 are excluded from the hash whitelist",
       "guard hash whitelist at config, keygen, key import and every primitive call", false},
  };
}

}  // namespace secalgo::guard
