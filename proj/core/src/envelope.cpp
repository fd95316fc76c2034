#include <algorithm>

#include <json.hpp>

#include "keys_internal.hpp"
#include "secalgo/error.hpp"
#include "secalgo/guard.hpp"
#include "secalgo/keys.hpp"

namespace secalgo {

namespace {

using ordered_json = nlohmann::ordered_json;

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::size_t dh_exponent_bytes(const DhGroup& g) { return g.q.empty() ? g.p.size() : g.q.size(); }

// Labels arrive as text from files and messages. The guard sees them before
// anything is parsed so that tampering reports the misuse class.
KeyEnvelope from_text_labels(std::int64_t version, const std::string& algorithm, const std::string& size,
                             const std::string& mode, const std::string& part,
                             const std::string& sign_hash, const std::string& sign_mode,
                             SecureBytes material) {
  if (version != KeyEnvelope::kVersion)
    throw ParseError("unsupported key version " + std::to_string(version));
  guard::check_key_spec({algorithm, size, mode, sign_hash});
  auto p = parse_key_part(part);
  if (!p) throw ParseError("unknown key part '" + part + "'");
  auto sm = parse_sign_mode(sign_mode);
  if (!sm) throw ParseError("unknown sign mode '" + sign_mode + "'");
  return KeyEnvelope::create(*parse_algorithm(algorithm), size, *parse_mode(mode), *p,
                             *parse_hash(sign_hash), *sm, std::move(material));
}

}  // namespace

std::string detail::canonical_size(Algorithm a, Mode m, std::string_view size) {
  for (auto& s : guard::allowed_sizes(a, m))
    if (iequals(s, size)) return s;
  return std::string(size);
}

KeyEnvelope KeyEnvelope::create(Algorithm algorithm, std::string size, Mode mode, KeyPart part,
                                Hash sign_hash, SignMode sign_mode, SecureBytes material,
                                provider::KeyHandle handle) {
  guard::check_labels(algorithm, size, mode, sign_hash);
  size = detail::canonical_size(algorithm, mode, size);

  if (is_symmetric(algorithm) != (part == KeyPart::secret))
    throw WrongKeyPart(std::string(name(algorithm)) + " keys cannot have part " + std::string(name(part)));
  if (material.empty()) throw ParseError("empty key material");

  if (is_symmetric(algorithm)) {
    if (material.size() * 8 != static_cast<std::size_t>(std::stoi(size)))
      throw ParseError("key material length does not match size " + size);
  } else if (algorithm == Algorithm::dh) {
    const DhGroup& g = dh_group(size);
    std::size_t want = part == KeyPart::private_part ? dh_exponent_bytes(g) : g.p.size();
    if (material.size() != want) throw ParseError("DH key material length does not match group " + size);
  } else {
    auto& prov = provider::current();
    bool priv = part == KeyPart::private_part;
    if (!handle) handle = priv ? prov.load_private(algorithm, material.view()) : prov.load_public(algorithm, material.view());
    if (handle->algorithm() != algorithm || handle->has_private() != priv)
      throw ParseError("key handle does not match the labels");
    if (!iequals(handle->size(), size))
      throw ParseError("key material is " + handle->size() + ", label says " + size);
  }

  KeyEnvelope k;
  k.algorithm_ = algorithm;
  k.size_ = std::move(size);
  k.mode_ = mode;
  k.part_ = part;
  k.sign_hash_ = sign_hash;
  k.sign_mode_ = sign_mode;
  k.material_ = std::move(material);
  k.handle_ = std::move(handle);
  return k;
}

bool operator==(const KeyEnvelope& a, const KeyEnvelope& b) {
  return a.version_ == b.version_ && a.algorithm_ == b.algorithm_ && a.size_ == b.size_ &&
         a.mode_ == b.mode_ && a.part_ == b.part_ && a.sign_hash_ == b.sign_hash_ &&
         a.sign_mode_ == b.sign_mode_ && a.material_ == b.material_;
}

std::string export_key(const KeyEnvelope& key) {
  ordered_json j;
  j["version"] = key.version();
  j["algorithm"] = name(key.algorithm());
  if (all_digits(key.size()))
    j["size"] = std::stoll(key.size());
  else
    j["size"] = key.size();
  j["mode"] = name(key.mode());
  j["part"] = name(key.part());
  j["sign_hash"] = name(key.sign_hash());
  j["sign_mode"] = name(key.sign_mode());
  j["material"] = base64url_encode(key.material().view());
  return j.dump(2) + "\n";
}

KeyEnvelope import_key(std::string_view text) {
  static constexpr const char* kFields[] = {"version",   "algorithm", "size",     "mode",
                                            "part",      "sign_hash", "sign_mode", "material"};
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("key file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("key file must hold a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(std::begin(kFields), std::end(kFields), it.key()) == std::end(kFields))
      throw ParseError("unexpected key field '" + it.key() + "'");
  }
  auto str = [&](const char* f) -> std::string {
    if (!j.contains(f) || !j[f].is_string()) throw ParseError(std::string("key field '") + f + "' missing or not a string");
    return j[f].get<std::string>();
  };
  if (!j.contains("version") || !j["version"].is_number_integer()) throw ParseError("key field 'version' missing");
  std::string size;
  if (j.contains("size") && j["size"].is_number_integer())
    size = std::to_string(j["size"].get<std::int64_t>());
  else
    size = str("size");

  std::string algorithm = str("algorithm"), mode = str("mode"), part = str("part"),
              sign_hash = str("sign_hash"), sign_mode = str("sign_mode"), material = str("material");
  Bytes raw = base64url_decode(material);
  return from_text_labels(j["version"].get<std::int64_t>(), algorithm, size, mode, part, sign_hash,
                          sign_mode, SecureBytes(std::move(raw)));
}

codec::Value to_value(const KeyEnvelope& key) {
  return codec::Tuple{
      codec::Value(static_cast<std::int64_t>(key.version())),
      codec::Value(name(key.algorithm())),
      codec::Value(key.size()),
      codec::Value(name(key.mode())),
      codec::Value(name(key.part())),
      codec::Value(name(key.sign_hash())),
      codec::Value(name(key.sign_mode())),
      codec::Value(key.material().view()),
  };
}

KeyEnvelope key_from_value(const codec::Value& v) {
  const auto& t = v.as_tuple(8);
  return from_text_labels(t[0].as_int(), t[1].as_string(), t[2].as_string(), t[3].as_string(),
                          t[4].as_string(), t[5].as_string(), t[6].as_string(),
                          SecureBytes(ByteView(t[7].as_bytes())));
}

KeyEnvelope public_half(const KeyEnvelope& key) {
  if (key.part() == KeyPart::public_part) return key;
  if (key.part() != KeyPart::private_part) throw WrongKeyPart("shared keys have no public half");
  if (key.algorithm() == Algorithm::dh) {
    const DhGroup& g = dh_group(key.size());
    return KeyEnvelope::create(Algorithm::dh, key.size(), key.mode(), KeyPart::public_part, key.sign_hash(),
                               key.sign_mode(), SecureBytes(dh_public_value(g, key.material().view())));
  }
  auto& prov = provider::current();
  Bytes der = prov.public_der(*key.handle());
  auto handle = prov.load_public(key.algorithm(), der);
  return KeyEnvelope::create(key.algorithm(), key.size(), key.mode(), KeyPart::public_part, key.sign_hash(),
                             key.sign_mode(), SecureBytes(std::move(der)), std::move(handle));
}

}  // namespace secalgo
