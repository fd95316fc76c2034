#include "keys_internal.hpp"
#include "secalgo/error.hpp"
#include "secalgo/guard.hpp"
#include "secalgo/instrument.hpp"
#include "secalgo/keys.hpp"
#include "secalgo/random.hpp"

namespace secalgo {

namespace {

using config::Item;

Algorithm resolve_algorithm(std::string_view type, const config::Scope& scope) {
  std::string n(type);
  if (iequals(type, "shared")) n = scope.resolve(Item::key_type_shared);
  else if (iequals(type, "public")) n = scope.resolve(Item::key_type_public);
  if (auto a = parse_algorithm(n)) return *a;
  if (guard::is_obsolete_algorithm(n))
    throw MisuseError(MisuseClass::M3S, "algorithm " + n + " is not on the whitelist");
  throw UnknownAlgorithm("unknown algorithm '" + n + "'");
}

// Mode label: the per-call option, else the configured block mode for block
// ciphers. An unbound table default that does not fit the cipher falls back
// to the cipher's own default; non-block algorithms have a fixed label.
std::string resolve_mode(Algorithm a, const config::Scope& scope, const KeygenOptions& opts) {
  if (opts.mode) return *opts.mode;
  if (!is_block_cipher(a)) return std::string(name(guard::default_mode(a)));
  if (auto bound = scope.bound(Item::block_cipher_mode)) return *bound;
  auto dflt = parse_mode(config::default_value(Item::block_cipher_mode));
  if (dflt && guard::is_allowed_mode(a, *dflt)) return std::string(name(*dflt));
  return std::string(name(guard::default_mode(a)));
}

std::string resolve_size(Algorithm a, std::string_view mode, const config::Scope& scope,
                         const KeygenOptions& opts) {
  if (opts.size) return *opts.size;
  Mode m = parse_mode(mode).value_or(Mode::none);
  if (a == Algorithm::dh) return guard::default_size(a, m);
  Item item = is_symmetric(a) ? Item::key_size_shared : Item::key_size_public;
  if (auto bound = scope.bound(item)) return *bound;
  std::string dflt(config::default_value(item));
  if (guard::is_allowed_size(a, m, dflt)) return dflt;
  return guard::default_size(a, m);
}

}  // namespace

GeneratedKey keygen(std::string_view type, const config::Scope& scope, const KeygenOptions& opts) {
  instrument::Call call(instrument::Primitive::keygen);

  Algorithm a = resolve_algorithm(type, scope);
  std::string mode = resolve_mode(a, scope, opts);
  std::string size = resolve_size(a, mode, scope, opts);
  std::string hash = opts.sign_hash ? *opts.sign_hash : scope.resolve(Item::sign_hash);
  guard::check_key_spec({std::string(name(a)), size, mode, hash});

  std::string sm_text = opts.sign_mode ? *opts.sign_mode : scope.resolve(Item::sign_mode);
  auto sm = parse_sign_mode(sm_text);
  if (!sm) throw DisallowedValue("value '" + sm_text + "' is not allowed for sign_mode", std::nullopt);

  Mode m = *parse_mode(mode);
  Hash h = *parse_hash(hash);
  size = detail::canonical_size(a, m, size);

  if (is_symmetric(a)) {
    Bytes material = random_bytes(static_cast<std::size_t>(std::stoi(size)) / 8);
    return KeyEnvelope::create(a, size, m, KeyPart::secret, h, *sm, SecureBytes(std::move(material)));
  }
  if (a == Algorithm::dh) return detail::dh_keypair(dh_group(size), h, *sm);

  auto gen = provider::current().generate_keypair(a, size);
  return KeyPair{
      KeyEnvelope::create(a, size, m, KeyPart::private_part, h, *sm, SecureBytes(std::move(gen.private_der)),
                          std::move(gen.private_key)),
      KeyEnvelope::create(a, size, m, KeyPart::public_part, h, *sm, SecureBytes(std::move(gen.public_der)),
                          std::move(gen.public_key)),
  };
}

KeyEnvelope keygen_shared(std::string_view type, const config::Scope& scope, const KeygenOptions& options) {
  auto k = keygen(type, scope, options);
  if (auto* e = std::get_if<KeyEnvelope>(&k)) return std::move(*e);
  throw UnknownAlgorithm("'" + std::string(type) + "' does not name a shared-key algorithm");
}

KeyPair keygen_pair(std::string_view type, const config::Scope& scope, const KeygenOptions& options) {
  auto k = keygen(type, scope, options);
  if (auto* p = std::get_if<KeyPair>(&k)) return std::move(*p);
  throw UnknownAlgorithm("'" + std::string(type) + "' does not name a public-key algorithm");
}

}  // namespace secalgo
