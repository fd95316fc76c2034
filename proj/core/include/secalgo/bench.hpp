#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

// Overhead of the wrapped primitives against the same operation done
// directly on the provider. Direct timings include encoding the value, as a
// caller of the backend would have to.

namespace secalgo::bench {

struct BenchOptions {
  /// Wall-clock length of one measurement loop.
  double min_seconds = 1.0;
  /// Measurement loops per operation; the reported value is their mean.
  int repetitions = 50;
  bool shared_ops = true;
  bool public_ops = true;
  /// Called after each row completes.
  std::function<void(const struct BenchRow&)> progress;
};

struct BenchRow {
  std::string group;          // "shared" or "public"
  std::string operation;      // keygen, encrypt, decrypt, sign, verify
  std::string configuration;  // e.g. "AES, 256, CBC, PKCS7"
  double direct_us = 0;
  double wrapped_us = 0;
  std::uint64_t iterations = 0;  // per side, over all repetitions

  double overhead_us() const { return wrapped_us - direct_us; }
  double overhead_percent() const {
    return direct_us > 0 ? 100.0 * (wrapped_us - direct_us) / direct_us : 0.0;
  }
};

std::vector<BenchRow> run(const BenchOptions& options);

std::string to_json(const std::vector<BenchRow>& rows);
std::string to_table(const std::vector<BenchRow>& rows);

}  // namespace secalgo::bench
