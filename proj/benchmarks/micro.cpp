#include <benchmark/benchmark.h>

#include "secalgo/secalgo.hpp"

using namespace secalgo;
using codec::Value;
using config::Scope;

namespace {

Value payload(std::int64_t n) { return Value(Bytes(static_cast<std::size_t>(n), 0x42)); }

void BM_Encode(benchmark::State& state) {
  codec::Tuple t;
  for (int i = 0; i < state.range(0); ++i) t.push_back(Value(std::int64_t{i}));
  const Value v(std::move(t));
  for (auto _ : state) benchmark::DoNotOptimize(codec::encode(v));
}
BENCHMARK(BM_Encode)->Arg(1)->Arg(64)->Arg(1024);

void BM_Decode(benchmark::State& state) {
  codec::Tuple t;
  for (int i = 0; i < state.range(0); ++i) t.push_back(Value(std::int64_t{i}));
  const Bytes wire = codec::encode(Value(std::move(t)));
  for (auto _ : state) benchmark::DoNotOptimize(codec::decode(wire));
}
BENCHMARK(BM_Decode)->Arg(1)->Arg(64)->Arg(1024);

void BM_EncryptShared(benchmark::State& state, const char* algorithm, const char* mode) {
  const KeyEnvelope k = keygen_shared(algorithm, Scope(), {.mode = mode});
  const Value v = payload(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(encrypt(v, k));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_EncryptShared, aes_gcm, "AES", "GCM")->Arg(64)->Arg(4096)->Arg(1 << 20);
BENCHMARK_CAPTURE(BM_EncryptShared, aes_cbc, "AES", "CBC")->Arg(64)->Arg(4096)->Arg(1 << 20);
BENCHMARK_CAPTURE(BM_EncryptShared, aes_siv, "AES", "SIV")->Arg(64)->Arg(4096);
BENCHMARK_CAPTURE(BM_EncryptShared, chacha20, "ChaCha20", "none")->Arg(64)->Arg(4096)->Arg(1 << 20);

void BM_DecryptShared(benchmark::State& state) {
  const KeyEnvelope k = keygen_shared("AES", Scope());
  const CipherEnvelope env = encrypt(payload(state.range(0)), k);
  for (auto _ : state) benchmark::DoNotOptimize(decrypt(env, k));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DecryptShared)->Arg(64)->Arg(4096)->Arg(1 << 20);

void BM_EncryptPublic(benchmark::State& state) {
  const KeyPair kp = keygen_pair("RSA", Scope());
  const Value v = payload(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(encrypt(v, kp.public_key));
}
// 64 bytes goes direct; 4096 bytes takes the hybrid path.
BENCHMARK(BM_EncryptPublic)->Arg(64)->Arg(4096);

void BM_Sign(benchmark::State& state, const char* algorithm) {
  const GeneratedKey g = keygen(algorithm, Scope());
  const KeyEnvelope& k = std::holds_alternative<KeyPair>(g) ? std::get<KeyPair>(g).private_key : std::get<KeyEnvelope>(g);
  const Value v = payload(256);
  for (auto _ : state) benchmark::DoNotOptimize(sign(v, k));
}
BENCHMARK_CAPTURE(BM_Sign, hmac, "HMAC");
BENCHMARK_CAPTURE(BM_Sign, rsa, "RSA");
BENCHMARK_CAPTURE(BM_Sign, dsa, "DSA");
BENCHMARK_CAPTURE(BM_Sign, ecdsa, "ECDSA");

void BM_KeygenShared(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(keygen_shared("AES", Scope()));
}
BENCHMARK(BM_KeygenShared);

void BM_Protocol(benchmark::State& state, const char* name) {
  for (auto _ : state) benchmark::DoNotOptimize(protocols::run(name));
}
BENCHMARK_CAPTURE(BM_Protocol, ns_sk, "ns-sk")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Protocol, ds_simp, "ds-simp")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
