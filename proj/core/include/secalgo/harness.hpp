#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secalgo/bytes.hpp"
#include "secalgo/codec.hpp"
#include "secalgo/config.hpp"
#include "secalgo/instrument.hpp"

// In-process message-passing runtime for protocol roles. Each role runs on
// its own thread; channels are the only shared state. Deterministic mode
// hands a single baton between roles in (round, role-name) order so a seeded
// run is reproducible byte for byte. Concurrent mode lets roles run freely.

namespace secalgo::harness {

enum class Scheduling { deterministic, concurrent };

struct Message {
  int tag = 0;
  codec::Value payload;
  std::string sender;
  std::string receiver;
};

/// A message as it crossed the channel: the encoded payload.
struct WireMessage {
  int tag = 0;
  std::string sender;
  std::string receiver;
  Bytes wire;
};

struct RunOptions {
  Scheduling scheduling = Scheduling::deterministic;
  /// Upper bound on any single await in concurrent mode.
  std::chrono::milliseconds deadline{10000};
  /// Seeds every random draw of the run, including key generation.
  std::optional<std::uint64_t> seed;
  /// Seconds; defaults to the system clock.
  std::function<std::int64_t()> clock;
  /// Sees and may modify each message on the wire before delivery.
  std::function<void(WireMessage&)> interceptor;
  /// Enclosing scope for every role; defaults to the global scope.
  std::optional<config::Scope> scope;
};

struct ProtocolTrace {
  std::string protocol;
  std::vector<WireMessage> messages;
  instrument::Counters calls;
  std::map<std::string, std::int64_t> role_ns;
  std::int64_t library_ns = 0;
  std::int64_t protocol_ns = 0;
  std::map<std::string, std::vector<codec::Value>> outputs;

  double library_ms() const { return static_cast<double>(library_ns) / 1e6; }
  double protocol_ms() const { return static_cast<double>(protocol_ns) / 1e6; }

  /// JSON with hex SHA-256 digests of each wire payload.
  std::string to_json(int indent = 2) const;
};

struct Pattern {
  int tag;
  std::optional<std::string> from;
};

class Network;

/// What a role body sees: its name, its scope and the channels.
class Process {
 public:
  const std::string& name() const { return name_; }
  const config::Scope& scope() const { return scope_; }

  /// Throws UnknownRole.
  void send(int tag, codec::Value payload, std::string_view to);
  /// Blocks until a message matching the pattern is queued, then removes the
  /// oldest such message. Throws TimeoutError when the run can no longer
  /// make progress or the deadline passes.
  Message await_receive(const Pattern& pattern);
  Message receive(int tag, std::string_view from) { return await_receive({tag, std::string(from)}); }

  void output(codec::Value v);
  std::int64_t now() const;

 private:
  friend class Runtime;
  friend class Network;
  Process(Network& net, std::string name, config::Scope scope)
      : net_(net), name_(std::move(name)), scope_(std::move(scope)) {}

  Network& net_;
  std::string name_;
  config::Scope scope_;
};

using RoleBody = std::function<void(Process&)>;

/// One protocol run. Construct, perform setup (calls made now are counted
/// but not timed), spawn roles, then run().
class Runtime {
 public:
  explicit Runtime(RunOptions options = {});
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  /// Scope for the setup phase and the default for roles.
  const config::Scope& scope() const;

  /// Throws std::invalid_argument on a duplicate role name.
  void spawn(std::string role, RoleBody body);
  void spawn(std::string role, RoleBody body, config::Scope scope);

  /// Runs every role to completion and returns the trace. If any role fails
  /// the first non-timeout failure is rethrown (a TimeoutError only when
  /// nothing else went wrong). The trace stays available via trace().
  ProtocolTrace run(std::string protocol);

  const ProtocolTrace& trace() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace secalgo::harness
