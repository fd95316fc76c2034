#include <algorithm>
#include <cstring>

#include "secalgo/error.hpp"
#include "secalgo/instrument.hpp"
#include "keys_internal.hpp"
#include "secalgo/keys.hpp"
#include "secalgo/random.hpp"

namespace secalgo {

namespace {

struct GroupHex {
  const char* name;
  const char* p;
  const char* g;
  const char* q;
};

// RFC 3526 MODP groups (generator 2, q = (p-1)/2) and the RFC 5114
// prime-order-subgroup groups.
constexpr GroupHex kGroups[] = {
    {"modp-2048",
     "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74"
     "020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f1437"
     "4fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7ed"
     "ee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf05"
     "98da48361c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb"
     "9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3b"
     "e39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf695581718"
     "3995497cea956ae515d2261898fa051015728e5a8aacaa68ffffffffffffffff",
     "02",
     "7fffffffffffffffe487ed5110b4611a62633145c06e0e68948127044533e63a"
     "0105df531d89cd9128a5043cc71a026ef7ca8cd9e69d218d98158536f92f8a1b"
     "a7f09ab6b6a8e122f242dabb312f3f637a262174d31bf6b585ffae5b7a035bf6"
     "f71c35fdad44cfd2d74f9208be258ff324943328f6722d9ee1003e5c50b1df82"
     "cc6d241b0e2ae9cd348b1fd47e9267afc1b2ae91ee51d6cb0e3179ab1042a95d"
     "cf6a9483b84b4b36b3861aa7255e4c0278ba3604650c10be19482f23171b671d"
     "f1cf3b960c074301cd93c1d17603d147dae2aef837a62964ef15e5fb4aac0b8c"
     "1ccaa4be754ab5728ae9130c4c7d02880ab9472d455655347fffffffffffffff"},
    {"modp-3072",
     "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74"
     "020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f1437"
     "4fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7ed"
     "ee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf05"
     "98da48361c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb"
     "9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3b"
     "e39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf695581718"
     "3995497cea956ae515d2261898fa051015728e5a8aaac42dad33170d04507a33"
     "a85521abdf1cba64ecfb850458dbef0a8aea71575d060c7db3970f85a6e1e4c7"
     "abf5ae8cdb0933d71e8c94e04a25619dcee3d2261ad2ee6bf12ffa06d98a0864"
     "d87602733ec86a64521f2b18177b200cbbe117577a615d6c770988c0bad946e2"
     "08e24fa074e5ab3143db5bfce0fd108e4b82d120a93ad2caffffffffffffffff",
     "02",
     "7fffffffffffffffe487ed5110b4611a62633145c06e0e68948127044533e63a"
     "0105df531d89cd9128a5043cc71a026ef7ca8cd9e69d218d98158536f92f8a1b"
     "a7f09ab6b6a8e122f242dabb312f3f637a262174d31bf6b585ffae5b7a035bf6"
     "f71c35fdad44cfd2d74f9208be258ff324943328f6722d9ee1003e5c50b1df82"
     "cc6d241b0e2ae9cd348b1fd47e9267afc1b2ae91ee51d6cb0e3179ab1042a95d"
     "cf6a9483b84b4b36b3861aa7255e4c0278ba3604650c10be19482f23171b671d"
     "f1cf3b960c074301cd93c1d17603d147dae2aef837a62964ef15e5fb4aac0b8c"
     "1ccaa4be754ab5728ae9130c4c7d02880ab9472d45556216d6998b8682283d19"
     "d42a90d5ef8e5d32767dc2822c6df785457538abae83063ed9cb87c2d370f263"
     "d5fad7466d8499eb8f464a702512b0cee771e9130d697735f897fd036cc50432"
     "6c3b01399f643532290f958c0bbd90065df08babbd30aeb63b84c4605d6ca371"
     "047127d03a72d598a1edadfe707e884725c16890549d69657fffffffffffffff"},
    {"modp-4096",
     "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74"
     "020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f1437"
     "4fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7ed"
     "ee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf05"
     "98da48361c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb"
     "9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3b"
     "e39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf695581718"
     "3995497cea956ae515d2261898fa051015728e5a8aaac42dad33170d04507a33"
     "a85521abdf1cba64ecfb850458dbef0a8aea71575d060c7db3970f85a6e1e4c7"
     "abf5ae8cdb0933d71e8c94e04a25619dcee3d2261ad2ee6bf12ffa06d98a0864"
     "d87602733ec86a64521f2b18177b200cbbe117577a615d6c770988c0bad946e2"
     "08e24fa074e5ab3143db5bfce0fd108e4b82d120a92108011a723c12a787e6d7"
     "88719a10bdba5b2699c327186af4e23c1a946834b6150bda2583e9ca2ad44ce8"
     "dbbbc2db04de8ef92e8efc141fbecaa6287c59474e6bc05d99b2964fa090c3a2"
     "233ba186515be7ed1f612970cee2d7afb81bdd762170481cd0069127d5b05aa9"
     "93b4ea988d8fddc186ffb7dc90a6c08f4df435c934063199ffffffffffffffff",
     "02",
     "7fffffffffffffffe487ed5110b4611a62633145c06e0e68948127044533e63a"
     "0105df531d89cd9128a5043cc71a026ef7ca8cd9e69d218d98158536f92f8a1b"
     "a7f09ab6b6a8e122f242dabb312f3f637a262174d31bf6b585ffae5b7a035bf6"
     "f71c35fdad44cfd2d74f9208be258ff324943328f6722d9ee1003e5c50b1df82"
     "cc6d241b0e2ae9cd348b1fd47e9267afc1b2ae91ee51d6cb0e3179ab1042a95d"
     "cf6a9483b84b4b36b3861aa7255e4c0278ba3604650c10be19482f23171b671d"
     "f1cf3b960c074301cd93c1d17603d147dae2aef837a62964ef15e5fb4aac0b8c"
     "1ccaa4be754ab5728ae9130c4c7d02880ab9472d45556216d6998b8682283d19"
     "d42a90d5ef8e5d32767dc2822c6df785457538abae83063ed9cb87c2d370f263"
     "d5fad7466d8499eb8f464a702512b0cee771e9130d697735f897fd036cc50432"
     "6c3b01399f643532290f958c0bbd90065df08babbd30aeb63b84c4605d6ca371"
     "047127d03a72d598a1edadfe707e884725c16890549084008d391e0953c3f36b"
     "c438cd085edd2d934ce1938c357a711e0d4a341a5b0a85ed12c1f4e5156a2674"
     "6ddde16d826f477c97477e0a0fdf6553143e2ca3a735e02eccd94b27d04861d1"
     "119dd0c328adf3f68fb094b867716bd7dc0deebb10b8240e68034893ead82d54"
     "c9da754c46c7eee0c37fdbee48536047a6fa1ae49a0318ccffffffffffffffff"},
    {"rfc5114-2048-224",
     "ad107e1e9123a9d0d660faa79559c51fa20d64e5683b9fd1b54b1597b61d0a75"
     "e6fa141df95a56dbaf9a3c407ba1df15eb3d688a309c180e1de6b85a1274a0a6"
     "6d3f8152ad6ac2129037c9edefda4df8d91e8fef55b7394b7ad5b7d0b6c12207"
     "c9f98d11ed34dbf6c6ba0b2c8bbc27be6a00e0a0b9c49708b3bf8a3170918836"
     "81286130bc8985db1602e714415d9330278273c7de31efdc7310f7121fd5a074"
     "15987d9adc0a486dcdf93acc44328387315d75e198c641a480cd86a1b9e587e8"
     "be60e69cc928b2b9c52172e413042e9b23f10b0e16e79763c9b53dcf4ba80a29"
     "e3fb73c16b8e75b97ef363e2ffa31f71cf9de5384e71b81c0ac4dffe0c10e64f",
     "ac4032ef4f2d9ae39df30b5c8ffdac506cdebe7b89998caf74866a08cfe4ffe3"
     "a6824a4e10b9a6f0dd921f01a70c4afaab739d7700c29f52c57db17c620a8652"
     "be5e9001a8d66ad7c17669101999024af4d027275ac1348bb8a762d0521bc98a"
     "e247150422ea1ed409939d54da7460cdb5f6c6b250717cbef180eb34118e98d1"
     "19529a45d6f834566e3025e316a330efbb77a86f0c1ab15b051ae3d428c8f8ac"
     "b70a8137150b8eeb10e183edd19963ddd9e263e4770589ef6aa21e7f5f2ff381"
     "b539cce3409d13cd566afbb48d6c019181e1bcfe94b30269edfe72fe9b6aa4bd"
     "7b5a0f1c71cfff4c19c418e1f6ec017981bc087f2a7065b384b890d3191f2bfa",
     "801c0d34c58d93fe997177101f80535a4738cebcbf389a99b36371eb"},
    {"rfc5114-2048-256",
     "87a8e61db4b6663cffbbd19c651959998ceef608660dd0f25d2ceed4435e3b00"
     "e00df8f1d61957d4faf7df4561b2aa3016c3d91134096faa3bf4296d830e9a7c"
     "209e0c6497517abd5a8a9d306bcf67ed91f9e6725b4758c022e0b1ef4275bf7b"
     "6c5bfc11d45f9088b941f54eb1e59bb8bc39a0bf12307f5c4fdb70c581b23f76"
     "b63acae1caa6b7902d52526735488a0ef13c6d9a51bfa4ab3ad8347796524d8e"
     "f6a167b5a41825d967e144e5140564251ccacb83e6b486f6b3ca3f7971506026"
     "c0b857f689962856ded4010abd0be621c3a3960a54e710c375f26375d7014103"
     "a4b54330c198af126116d2276e11715f693877fad7ef09cadb094ae91e1a1597",
     "3fb32c9b73134d0b2e77506660edbd484ca7b18f21ef205407f4793a1a0ba125"
     "10dbc15077be463fff4fed4aac0bb555be3a6c1b0c6b47b1bc3773bf7e8c6f62"
     "901228f8c28cbb18a55ae31341000a650196f931c77a57f2ddf463e5e9ec144b"
     "777de62aaab8a8628ac376d282d6ed3864e67982428ebc831d14348f6f2f9193"
     "b5045af2767164e1dfc967c1fb3f2e55a4bd1bffe83b9c80d052b985d182ea0a"
     "db2a3b7313d3fe14c8484b1e052588b9b7d2bbd2df016199ecd06e1557cd0915"
     "b3353bbb64e0ec377fd028370df92b52c7891428cdc67eb6184b523d1db246c3"
     "2f63078490f00ef8d647d148d47954515e2327cfef98c582664b4c0f6cc41659",
     "8cf83642a709a097b447997640129da299b1a47d1eb3750ba308b0fe64f5fbd3"},
};

// Big-endian bytes without leading zeros.
ByteView strip(ByteView b) {
  std::size_t i = 0;
  while (i < b.size() && b[i] == 0) ++i;
  return b.subspan(i);
}

int compare_be(ByteView a, ByteView b) {
  a = strip(a);
  b = strip(b);
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  int c = std::memcmp(a.data(), b.data(), a.size());
  return c < 0 ? -1 : c > 0 ? 1 : 0;
}

Bytes minus_small(ByteView a, std::uint8_t k) {
  Bytes out(a.begin(), a.end());
  int borrow = k;
  for (std::size_t i = out.size(); i-- > 0 && borrow;) {
    int v = out[i] - borrow;
    borrow = v < 0 ? 1 : 0;
    out[i] = static_cast<std::uint8_t>(v + (borrow ? 256 : 0));
  }
  return out;
}

Bytes small(std::uint8_t v) { return Bytes{v}; }

std::vector<DhGroup> build_groups() {
  std::vector<DhGroup> out;
  for (const auto& h : kGroups) out.push_back({h.name, hex_decode(h.p), hex_decode(h.g), hex_decode(h.q)});
  return out;
}

const std::vector<DhGroup>& groups() {
  static const std::vector<DhGroup> g = build_groups();
  return g;
}

// Uniform in [2, bound - 2] by rejection on the bit length of bound.
Bytes random_exponent(ByteView bound) {
  ByteView b = strip(bound);
  Bytes hi = minus_small(bound, 2);
  int top_bits = 8;
  while (top_bits > 0 && !(b[0] & (1u << (top_bits - 1)))) --top_bits;
  const std::uint8_t mask = static_cast<std::uint8_t>((1u << top_bits) - 1);
  for (;;) {
    Bytes x = random_bytes(b.size());
    x[0] &= mask;
    if (compare_be(x, small(2)) >= 0 && compare_be(x, hi) <= 0) {
      Bytes padded(bound.size() - x.size(), 0);
      append(padded, x);
      return padded;
    }
  }
}

}  // namespace

const DhGroup& dh_group(std::string_view name) {
  for (const auto& g : groups())
    if (iequals(g.name, name)) return g;
  throw UnknownGroup("unknown Diffie-Hellman group '" + std::string(name) + "'");
}

std::vector<std::string> dh_group_names() {
  std::vector<std::string> out;
  for (const auto& g : groups()) out.push_back(g.name);
  return out;
}

Bytes dh_public_value(const DhGroup& group, ByteView exponent) {
  return provider::current().mod_exp(group.g, exponent, group.p);
}

Bytes dh_agree(const DhGroup& group, ByteView exponent, ByteView peer_public) {
  Bytes p_minus_1 = minus_small(group.p, 1);
  if (compare_be(peer_public, small(1)) <= 0 || compare_be(peer_public, p_minus_1) >= 0)
    throw DegenerateValue("peer public value outside (1, p-1)");
  auto& prov = provider::current();
  if (!group.q.empty()) {
    Bytes check = prov.mod_exp(peer_public, group.q, group.p);
    if (compare_be(check, small(1)) != 0) throw DegenerateValue("peer public value outside the subgroup");
  }
  return prov.mod_exp(peer_public, exponent, group.p);
}

KeyPair detail::dh_keypair(const DhGroup& group, Hash sign_hash, SignMode sign_mode) {
  Bytes x = random_exponent(group.q.empty() ? ByteView(minus_small(group.p, 1)) : ByteView(group.q));
  Bytes y = dh_public_value(group, x);
  return {
      KeyEnvelope::create(Algorithm::dh, group.name, Mode::none, KeyPart::private_part, sign_hash,
                          sign_mode, SecureBytes(std::move(x))),
      KeyEnvelope::create(Algorithm::dh, group.name, Mode::none, KeyPart::public_part, sign_hash,
                          sign_mode, SecureBytes(std::move(y))),
  };
}

KeyPair dh_keygen(std::string_view group_name) {
  instrument::Call call(instrument::Primitive::keygen);
  const DhGroup& group = dh_group(group_name);
  auto scope = config::global_scope();
  return detail::dh_keypair(group, *parse_hash(scope.resolve(config::Item::sign_hash)),
                            *parse_sign_mode(scope.resolve(config::Item::sign_mode)));
}

Bytes dh_shared_secret(const KeyEnvelope& private_key, const KeyEnvelope& peer_public) {
  if (private_key.algorithm() != Algorithm::dh || peer_public.algorithm() != Algorithm::dh)
    throw WrongKeyPart("Diffie-Hellman agreement needs DH keys");
  if (private_key.part() != KeyPart::private_part) throw WrongKeyPart("own key must be a private DH key");
  if (peer_public.part() != KeyPart::public_part) throw WrongKeyPart("peer key must be a public DH key");
  if (!iequals(private_key.size(), peer_public.size()))
    throw GroupMismatch("keys belong to groups " + private_key.size() + " and " + peer_public.size());
  instrument::TimedSection timed;
  return dh_agree(dh_group(private_key.size()), private_key.material().view(), peer_public.material().view());
}

}  // namespace secalgo
