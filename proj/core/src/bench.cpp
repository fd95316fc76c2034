#include "secalgo/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "secalgo/error.hpp"
#include "secalgo/instrument.hpp"
#include "secalgo/keys.hpp"
#include "secalgo/primitives.hpp"
#include "secalgo/provider.hpp"
#include "secalgo/random.hpp"

namespace secalgo::bench {

namespace {

using Fn = std::function<void()>;

struct Case {
  std::string group, operation, configuration;
  Fn direct, wrapped;
  // Keygen draws primes from the random stream; both sides replay the same
  // seed per iteration so that they search the same candidates.
  bool paired_seed = false;
};

// Keeps results observable so the work is not optimised away.
volatile std::size_t g_sink = 0;

void sink(std::size_t n) { g_sink = g_sink + n; }

std::int64_t time_batch(const Fn& f, int n) {
  const std::int64_t t0 = instrument::thread_cpu_ns();
  for (int i = 0; i < n; ++i) f();
  return instrument::thread_cpu_ns() - t0;
}

// Batches are sized to ~200 us so that clock reads stay out of the signal.
int batch_size(const Case& c) {
  if (c.paired_seed) return 1;
  time_batch(c.direct, 3);
  time_batch(c.wrapped, 3);
  const std::int64_t t = std::max<std::int64_t>(1, time_batch(c.direct, 5) / 5);
  return static_cast<int>(std::clamp<std::int64_t>(200'000 / t, 1, 10'000));
}

BenchRow measure(const Case& c, const BenchOptions& opts) {
  using clock = std::chrono::steady_clock;
  BenchRow row{c.group, c.operation, c.configuration};
  auto& prov = provider::current();
  const int batch = batch_size(c);
  std::uint64_t seed = 1;
  // Random rather than alternating side order: periodic backend work (RSA
  // re-blinds every 32 private operations) must not land on one side.
  std::mt19937_64 order(0x6f72646572);
  double direct_sum = 0, wrapped_sum = 0;

  for (int rep = 0; rep < opts.repetitions; ++rep) {
    std::int64_t direct_ns = 0, wrapped_ns = 0;
    std::uint64_t n = 0;
    const auto start = clock::now();
    do {
      const bool direct_first = order() & 1;
      for (int side = 0; side < 2; ++side) {
        const bool is_direct = (side == 0) == direct_first;
        if (c.paired_seed) prov.set_test_seed(seed);
        const std::int64_t t = time_batch(is_direct ? c.direct : c.wrapped, batch);
        (is_direct ? direct_ns : wrapped_ns) += t;
      }
      if (c.paired_seed) {
        prov.set_test_seed(std::nullopt);
        ++seed;
      }
      n += batch;
    } while (std::chrono::duration<double>(clock::now() - start).count() < opts.min_seconds);

    direct_sum += static_cast<double>(direct_ns) / 1e3 / static_cast<double>(n);
    wrapped_sum += static_cast<double>(wrapped_ns) / 1e3 / static_cast<double>(n);
    row.iterations += n;
  }
  row.direct_us = direct_sum / opts.repetitions;
  row.wrapped_us = wrapped_sum / opts.repetitions;
  return row;
}

constexpr std::size_t kTextBytes = 64;

std::vector<Case> shared_cases() {
  auto& prov = provider::current();
  std::vector<Case> cases;
  const codec::Value text(random_bytes(kTextBytes));
  const std::string aes = "AES, 256, CBC, PKCS7";
  const std::string hmac = "HMAC, 256, SHA512";

  KeygenOptions aes_opts{.size = "256", .mode = "CBC"};
  KeygenOptions hmac_opts{.size = "256", .sign_hash = "SHA512", .sign_mode = "detached"};
  auto aes_key = std::make_shared<KeyEnvelope>(keygen_shared("AES", config::global_scope(), aes_opts));
  auto hmac_key = std::make_shared<KeyEnvelope>(keygen_shared("HMAC", config::global_scope(), hmac_opts));

  cases.push_back({"shared", "keygen", aes,
                   [&prov = prov] {
                     Bytes k(32);
                     prov.random(k);
                     sink(k.size());
                   },
                   [aes_opts] { sink(keygen_shared("AES", config::global_scope(), aes_opts).material().size()); }});

  // Direct ciphertext is iv || body, the minimum a caller has to keep.
  cases.push_back({"shared", "encrypt", aes,
                   [&prov = prov, aes_key, text] {
                     Bytes pt = codec::encode(text);
                     Bytes out(16);
                     prov.random(out);
                     Bytes ct = prov.block_encrypt(Algorithm::aes, Mode::cbc, aes_key->material().view(), out,
                                                   pad_pkcs7(pt, 16));
                     append(out, ct);
                     sink(out.size());
                   },
                   [aes_key, text] { sink(encrypt(text, *aes_key).body.size()); }});

  Bytes direct_ct;
  {
    Bytes iv = random_bytes(16);
    direct_ct = iv;
    append(direct_ct, prov.block_encrypt(Algorithm::aes, Mode::cbc, aes_key->material().view(), iv,
                                         pad_pkcs7(codec::encode(text), 16)));
  }
  const CipherEnvelope env = encrypt(text, *aes_key);
  cases.push_back({"shared", "decrypt", aes,
                   [&prov = prov, aes_key, direct_ct] {
                     ByteView all(direct_ct);
                     Bytes padded = prov.block_decrypt(Algorithm::aes, Mode::cbc, aes_key->material().view(),
                                                       all.first(16), all.subspan(16));
                     auto pt = unpad_pkcs7(padded, 16);
                     if (!pt) throw std::runtime_error("bench: bad padding");
                     sink(static_cast<std::size_t>(codec::decode(*pt).tag()));
                   },
                   [aes_key, env] { sink(static_cast<std::size_t>(decrypt(env, *aes_key).tag())); }});

  cases.push_back({"shared", "sign", hmac,
                   [&prov = prov, hmac_key, text] {
                     sink(prov.hmac(Hash::sha512, hmac_key->material().view(), codec::encode(text)).size());
                   },
                   [hmac_key, text] { sink(sign(text, *hmac_key).index()); }});

  const Bytes mac = prov.hmac(Hash::sha512, hmac_key->material().view(), codec::encode(text));
  const Signature sig = std::get<Signature>(sign(text, *hmac_key));
  cases.push_back({"shared", "verify", hmac,
                   [&prov = prov, hmac_key, text, mac] {
                     Bytes m = prov.hmac(Hash::sha512, hmac_key->material().view(), codec::encode(text));
                     if (!equal_ct(m, mac)) throw std::runtime_error("bench: HMAC mismatch");
                   },
                   [hmac_key, text, sig] {
                     if (!verify(text, sig, *hmac_key)) throw std::runtime_error("bench: HMAC mismatch");
                   }});
  return cases;
}

std::vector<Case> public_cases() {
  auto& prov = provider::current();
  std::vector<Case> cases;
  const codec::Value text(random_bytes(kTextBytes));
  const std::string rsa = "RSA, 2048";
  const std::string oaep = "RSA, 2048, OAEP";
  const std::string pkcs1 = "RSA, 2048, PKCS1";

  KeygenOptions opts{.size = "2048", .sign_hash = "SHA256", .sign_mode = "detached"};
  auto pair = std::make_shared<KeyPair>(keygen_pair("RSA", config::global_scope(), opts));
  const provider::AsymmetricKey* priv = pair->private_key.handle();
  const provider::AsymmetricKey* pub = pair->public_key.handle();

  Case kg{"public", "keygen", rsa,
          [&prov = prov] {
            auto g = prov.generate_keypair(Algorithm::rsa, "2048");
            sink(g.private_der.size() + g.public_der.size());
          },
          [opts] { sink(keygen_pair("RSA", config::global_scope(), opts).public_key.material().size()); }};
  kg.paired_seed = true;
  cases.push_back(std::move(kg));

  cases.push_back({"public", "encrypt", oaep,
                   [&prov = prov, pair, pub, text] { sink(prov.oaep_encrypt(*pub, codec::encode(text)).size()); },
                   [pair, text] { sink(encrypt(text, pair->public_key).body.size()); }});

  const Bytes direct_ct = prov.oaep_encrypt(*pub, codec::encode(text));
  const CipherEnvelope env = encrypt(text, pair->public_key);
  cases.push_back({"public", "decrypt", oaep,
                   [&prov = prov, pair, priv, direct_ct] {
                     auto pt = prov.oaep_decrypt(*priv, direct_ct);
                     if (!pt) throw std::runtime_error("bench: OAEP failure");
                     sink(static_cast<std::size_t>(codec::decode(*pt).tag()));
                   },
                   [pair, env] { sink(static_cast<std::size_t>(decrypt(env, pair->private_key).tag())); }});

  cases.push_back({"public", "sign", pkcs1,
                   [&prov = prov, pair, priv, text] { sink(prov.sign(*priv, Hash::sha256, codec::encode(text)).size()); },
                   [pair, text] { sink(sign(text, pair->private_key).index()); }});

  const Bytes direct_sig = prov.sign(*priv, Hash::sha256, codec::encode(text));
  const Signature sig = std::get<Signature>(sign(text, pair->private_key));
  cases.push_back({"public", "verify", pkcs1,
                   [&prov = prov, pair, pub, text, direct_sig] {
                     if (!prov.verify(*pub, Hash::sha256, codec::encode(text), direct_sig))
                       throw std::runtime_error("bench: RSA verify failure");
                   },
                   [pair, text, sig] {
                     if (!verify(text, sig, pair->public_key)) throw std::runtime_error("bench: RSA verify failure");
                   }});
  return cases;
}

}  // namespace

std::vector<BenchRow> run(const BenchOptions& options) {
  if (options.repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (options.min_seconds < 0) throw std::invalid_argument("min_seconds must not be negative");
  std::vector<Case> cases;
  if (options.shared_ops) cases = shared_cases();
  if (options.public_ops) {
    auto pub = public_cases();
    cases.insert(cases.end(), std::make_move_iterator(pub.begin()), std::make_move_iterator(pub.end()));
  }
  std::vector<BenchRow> rows;
  for (const auto& c : cases) {
    rows.push_back(measure(c, options));
    if (options.progress) options.progress(rows.back());
  }
  return rows;
}

std::string to_json(const std::vector<BenchRow>& rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    j.push_back({{"group", r.group},
                 {"operation", r.operation},
                 {"configuration", r.configuration},
                 {"direct_us", r.direct_us},
                 {"wrapped_us", r.wrapped_us},
                 {"overhead_us", r.overhead_us()},
                 {"overhead_percent", r.overhead_percent()},
                 {"iterations", r.iterations}});
  }
  return j.dump(2);
}

std::string to_table(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-7s %-8s %-22s %14s %14s %10s %9s\n", "group", "op", "configuration",
                "direct_us", "wrapped_us", "delta_us", "delta_%");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-7s %-8s %-22s %14.2f %14.2f %10.2f %9.2f\n", r.group.c_str(),
                  r.operation.c_str(), r.configuration.c_str(), r.direct_us, r.wrapped_us, r.overhead_us(),
                  r.overhead_percent());
    out << line;
  }
  return out.str();
}

}  // namespace secalgo::bench
