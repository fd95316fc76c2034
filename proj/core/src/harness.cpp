#include "secalgo/harness.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "secalgo/error.hpp"
#include "secalgo/provider.hpp"
#include "secalgo/random.hpp"

namespace secalgo::harness {

namespace {

bool matches(const Pattern& p, const WireMessage& m) {
  return m.tag == p.tag && (!p.from || *p.from == m.sender);
}

std::int64_t system_seconds() {
  using namespace std::chrono;
  return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

// Shared state of one run. A single mutex guards every inbox and the
// scheduling fields.
class Network {
 public:
  enum class State { ready, waiting, done };

  struct Role {
    std::string name;
    RoleBody body;
    std::unique_ptr<Process> process;
    std::deque<WireMessage> inbox;
    State state = State::ready;
    std::optional<Pattern> waiting_for;
    std::int64_t cpu_ns = 0;
    std::exception_ptr error;
    std::uint64_t error_seq = 0;
    bool error_is_timeout = false;
    std::vector<codec::Value> outputs;
  };

  Network(const RunOptions& opts) : opts_(opts) {}

  Role& add(std::string name, RoleBody body, config::Scope scope) {
    auto [it, inserted] = roles_.try_emplace(name);
    if (!inserted) throw std::invalid_argument("duplicate role '" + name + "'");
    Role& r = it->second;
    r.name = name;
    r.body = std::move(body);
    r.process.reset(new Process(*this, name, std::move(scope)));
    return r;
  }

  std::map<std::string, Role>& roles() { return roles_; }
  std::vector<WireMessage>& log() { return log_; }

  void send(const std::string& from, int tag, const codec::Value& payload, std::string_view to) {
    WireMessage w{tag, from, std::string(to), codec::encode(payload)};
    std::lock_guard lock(mutex_);
    auto it = roles_.find(w.receiver);
    if (it == roles_.end()) throw UnknownRole("no role named '" + w.receiver + "'");
    if (opts_.interceptor) opts_.interceptor(w);
    log_.push_back(w);
    it->second.inbox.push_back(std::move(w));
    cv_.notify_all();
  }

  Message receive(const std::string& me, const Pattern& p) {
    std::unique_lock lock(mutex_);
    Role& self = roles_.at(me);
    const auto deadline = std::chrono::steady_clock::now() + opts_.deadline;
    for (;;) {
      auto hit = std::find_if(self.inbox.begin(), self.inbox.end(),
                              [&](const WireMessage& m) { return matches(p, m); });
      if (hit != self.inbox.end() && (!deterministic() || baton_ == me)) {
        WireMessage w = std::move(*hit);
        self.inbox.erase(hit);
        self.state = State::ready;
        self.waiting_for.reset();
        lock.unlock();
        return {w.tag, codec::decode(w.wire), w.sender, w.receiver};
      }
      if (stalled_) throw TimeoutError(me + " waits for message " + std::to_string(p.tag) + " that can never arrive");
      if (self.state != State::waiting) {
        self.state = State::waiting;
        self.waiting_for = p;
        if (deterministic() && baton_ == me) pass_baton(me);
        check_stall();
        if (stalled_) continue;
      }
      if (cv_.wait_until(lock, deadline) == std::cv_status::timeout)
        throw TimeoutError(me + " timed out waiting for message " + std::to_string(p.tag));
    }
  }

  void wait_for_turn(const std::string& me) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return !deterministic() || baton_ == me || stalled_; });
  }

  void finish(const std::string& me) {
    std::lock_guard lock(mutex_);
    Role& r = roles_.at(me);
    r.state = State::done;
    r.waiting_for.reset();
    if (deterministic() && baton_ == me) pass_baton(me);
    check_stall();
    cv_.notify_all();
  }

  void start() {
    std::lock_guard lock(mutex_);
    if (!roles_.empty()) baton_ = roles_.begin()->first;
  }

  std::uint64_t next_error_seq() {
    std::lock_guard lock(mutex_);
    return ++error_seq_;
  }

  void output(const std::string& me, codec::Value v) {
    std::lock_guard lock(mutex_);
    roles_.at(me).outputs.push_back(std::move(v));
  }

  std::int64_t now() const { return opts_.clock ? opts_.clock() : system_seconds(); }

 private:
  bool deterministic() const { return opts_.scheduling == Scheduling::deterministic; }

  bool runnable(const Role& r) const {
    if (r.state == State::ready) return true;
    if (r.state != State::waiting || !r.waiting_for) return false;
    return std::any_of(r.inbox.begin(), r.inbox.end(),
                       [&](const WireMessage& m) { return matches(*r.waiting_for, m); });
  }

  // Round-robin in name order, starting after the current holder.
  void pass_baton(const std::string& me) {
    auto it = roles_.upper_bound(me);
    for (std::size_t i = 0; i < roles_.size(); ++i, ++it) {
      if (it == roles_.end()) it = roles_.begin();
      if (runnable(it->second)) {
        baton_ = it->first;
        cv_.notify_all();
        return;
      }
    }
    baton_.clear();
  }

  void check_stall() {
    bool any_open = false;
    for (auto& [n, r] : roles_) {
      if (r.state == State::done) continue;
      any_open = true;
      if (runnable(r)) {
        if (deterministic() && baton_.empty()) {
          baton_ = n;
          cv_.notify_all();
        }
        return;
      }
    }
    if (any_open) {
      stalled_ = true;
      cv_.notify_all();
    }
  }

  const RunOptions& opts_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::string, Role> roles_;
  std::vector<WireMessage> log_;
  std::string baton_;
  bool stalled_ = false;
  std::uint64_t error_seq_ = 0;
};

void Process::send(int tag, codec::Value payload, std::string_view to) { net_.send(name_, tag, payload, to); }

Message Process::await_receive(const Pattern& pattern) { return net_.receive(name_, pattern); }

void Process::output(codec::Value v) { net_.output(name_, std::move(v)); }

std::int64_t Process::now() const { return net_.now(); }

struct Runtime::Impl {
  explicit Impl(RunOptions o)
      : options(std::move(o)), scope(options.scope ? *options.scope : config::global_scope()), net(options) {
    if (options.seed) seeded.emplace(*options.seed);
    setup.emplace(recorder, false);
  }

  RunOptions options;
  config::Scope scope;
  instrument::Recorder recorder;
  std::optional<SeededRandom> seeded;
  std::optional<instrument::Attach> setup;
  Network net;
  ProtocolTrace trace;
  bool ran = false;
};

Runtime::Runtime(RunOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Runtime::~Runtime() = default;

const config::Scope& Runtime::scope() const { return impl_->scope; }

void Runtime::spawn(std::string role, RoleBody body) { spawn(std::move(role), std::move(body), impl_->scope); }

void Runtime::spawn(std::string role, RoleBody body, config::Scope scope) {
  if (impl_->ran) throw std::logic_error("spawn after run");
  impl_->net.add(std::move(role), std::move(body), std::move(scope));
}

ProtocolTrace Runtime::run(std::string protocol) {
  if (impl_->ran) throw std::logic_error("a runtime runs once");
  impl_->ran = true;
  Network& net = impl_->net;
  net.start();

  std::vector<std::thread> threads;
  for (auto& [name, role] : net.roles()) {
    Network::Role* r = &role;
    threads.emplace_back([this, &net, r] {
      instrument::Attach attach(impl_->recorder, true);
      const std::int64_t start = instrument::thread_cpu_ns();
      try {
        net.wait_for_turn(r->name);
        r->body(*r->process);
      } catch (const TimeoutError&) {
        r->error = std::current_exception();
        r->error_is_timeout = true;
        r->error_seq = net.next_error_seq();
      } catch (...) {
        r->error = std::current_exception();
        r->error_seq = net.next_error_seq();
      }
      r->cpu_ns = instrument::thread_cpu_ns() - start;
      net.finish(r->name);
    });
  }
  for (auto& t : threads) t.join();

  ProtocolTrace& tr = impl_->trace;
  tr.protocol = std::move(protocol);
  tr.messages = net.log();
  tr.calls = impl_->recorder.counters();
  tr.library_ns = impl_->recorder.library_ns();
  tr.protocol_ns = 0;
  for (auto& [name, role] : net.roles()) {
    tr.role_ns[name] = role.cpu_ns;
    tr.protocol_ns += role.cpu_ns;
    if (!role.outputs.empty()) tr.outputs[name] = role.outputs;
  }

  const Network::Role* first = nullptr;
  const Network::Role* first_timeout = nullptr;
  for (auto& [name, role] : net.roles()) {
    if (!role.error) continue;
    auto& slot = role.error_is_timeout ? first_timeout : first;
    if (!slot || role.error_seq < slot->error_seq) slot = &role;
  }
  if (first) std::rethrow_exception(first->error);
  if (first_timeout) std::rethrow_exception(first_timeout->error);
  return tr;
}

const ProtocolTrace& Runtime::trace() const { return impl_->trace; }

std::string ProtocolTrace::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["protocol"] = protocol;
  auto& msgs = j["messages"] = nlohmann::ordered_json::array();
  auto& prov = provider::current();
  for (const auto& m : messages) {
    msgs.push_back({{"tag", m.tag},
                    {"from", m.sender},
                    {"to", m.receiver},
                    {"bytes", m.wire.size()},
                    {"sha256", hex_encode(prov.digest(Hash::sha256, m.wire))}});
  }
  auto& c = j["calls"];
  for (std::size_t i = 0; i < instrument::kPrimitiveCount; ++i)
    c[std::string(instrument::name(static_cast<instrument::Primitive>(i)))] = calls.calls[i];
  c["total"] = calls.total();
  auto& roles = j["role_ms"] = nlohmann::ordered_json::object();
  for (const auto& [n, ns] : role_ns) roles[n] = static_cast<double>(ns) / 1e6;
  j["library_ms"] = library_ms();
  j["protocol_ms"] = protocol_ms();
  auto& outs = j["outputs"] = nlohmann::ordered_json::object();
  for (const auto& [n, vs] : outputs) {
    auto& arr = outs[n] = nlohmann::ordered_json::array();
    for (const auto& v : vs) arr.push_back(codec::debug_string(v));
  }
  return j.dump(indent);
}

}  // namespace secalgo::harness
