#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "secalgo/harness.hpp"
#include "secalgo/labels.hpp"
#include "secalgo/primitives.hpp"

// Protocols built only from the five primitives. Call counts per run:
//
//   protocol   keygen encrypt decrypt sign verify  messages
//   ns-sk         3      5       5      0     0        7
//   ns-pk         3      3       3      2     2        7
//   ds            4      1       1      3     5        3
//   ds-simp       3      2       2      1     1        2
//   sdh           5      0       0      2     2        3

namespace secalgo::protocols {

inline constexpr std::int64_t kCertificateWindowSeconds = 300;

/// Needham-Schroeder shared key with the responder-nonce correction.
harness::ProtocolTrace run_ns_sk(const harness::RunOptions& options = {});
/// Needham-Schroeder public key with Lowe's fix (responder identity in
/// message 6) and a signing key server.
harness::ProtocolTrace run_ns_pk(const harness::RunOptions& options = {});
/// Denning-Sacco with an authentication server issuing timestamped
/// certificates.
harness::ProtocolTrace run_ds(const harness::RunOptions& options = {});
/// Two-message Denning-Sacco variant: A sends a signed fresh shared key under
/// B's public key, B answers with a secret under that key. sign_mode picks
/// the combined or detached formulation.
harness::ProtocolTrace run_ds_simplified(const harness::RunOptions& options = {},
                                         SignMode sign_mode = SignMode::combined);
/// Signed Diffie-Hellman (SIG-DH) over a MODP group.
harness::ProtocolTrace run_sdh(const harness::RunOptions& options = {},
                               std::string_view group = "modp-2048");

std::vector<std::string> names();
/// Dispatch by name ("ns-sk", "ns-pk", "ds", "ds-simp", "sdh"). Throws
/// std::invalid_argument for other names.
harness::ProtocolTrace run(std::string_view name, const harness::RunOptions& options = {});

/// Authority-signed binding of a subject name to its public key.
struct Certificate {
  std::string subject;
  KeyEnvelope subject_public_key;
  std::int64_t timestamp;
  SignedPayload wrapper;
};

/// One sign call under the authority's key.
Certificate issue_certificate(std::string_view subject, const KeyEnvelope& subject_public,
                              std::int64_t timestamp, const KeyEnvelope& authority_private);
/// One verify call. Throws VerificationFailed or StaleCertificate when the
/// timestamp is further than the window from `now`.
Certificate check_certificate(const codec::Value& wire, const KeyEnvelope& authority_public,
                              std::int64_t now,
                              std::int64_t window = kCertificateWindowSeconds);

struct MeasureOptions {
  /// Each repetition loops the protocol at least this long (wall time).
  double min_seconds = 1.0;
  harness::Scheduling scheduling = harness::Scheduling::concurrent;
};

struct TimingSummary {
  std::string protocol;
  int repetitions = 0;
  std::uint64_t runs = 0;
  std::size_t messages = 0;
  instrument::Counters calls;
  double protocol_ms = 0;  // mean CPU time per run, summed over roles
  double library_ms = 0;   // mean CPU time inside primitives per run
  std::vector<double> per_repetition_protocol_ms;

  double difference_ms() const { return protocol_ms - library_ms; }
};

/// Throws std::invalid_argument when repetitions < 1; propagates protocol
/// errors.
TimingSummary measure(std::string_view protocol, int repetitions,
                      const MeasureOptions& options = {});

}  // namespace secalgo::protocols
