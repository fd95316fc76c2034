#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <string_view>

// Per-primitive call counting and library-time accounting. A Recorder is
// attached to a thread; every public primitive entry point opens a Call.
// Nested primitive calls on the same thread are not counted twice.

namespace secalgo::instrument {

enum class Primitive { keygen, encrypt, decrypt, sign, verify };

inline constexpr std::size_t kPrimitiveCount = 5;
std::string_view name(Primitive p);

struct Counters {
  std::array<std::uint64_t, kPrimitiveCount> calls{};

  std::uint64_t operator[](Primitive p) const { return calls[static_cast<std::size_t>(p)]; }
  std::uint64_t total() const;
  friend bool operator==(const Counters&, const Counters&) = default;
};

class Recorder {
 public:
  void count(Primitive p);
  void add_library_ns(std::int64_t ns);

  Counters counters() const;
  std::int64_t library_ns() const { return library_ns_.load(std::memory_order_relaxed); }

 private:
  std::array<std::atomic<std::uint64_t>, kPrimitiveCount> calls_{};
  std::atomic<std::int64_t> library_ns_{0};
};

/// CPU time consumed by the calling thread, in nanoseconds.
std::int64_t thread_cpu_ns();

/// Binds a recorder to the current thread. When `timed` is false calls are
/// counted but their time is not added to library time (process setup).
class Attach {
 public:
  Attach(Recorder& r, bool timed);
  ~Attach();
  Attach(const Attach&) = delete;
  Attach& operator=(const Attach&) = delete;

 private:
  Recorder* prev_recorder_;
  bool prev_timed_;
};

/// Opened at the top of each primitive.
class Call {
 public:
  explicit Call(Primitive p);
  ~Call();
  Call(const Call&) = delete;
  Call& operator=(const Call&) = delete;

 private:
  std::int64_t start_ = -1;
};

/// Library work that is timed but is not one of the five primitives (the
/// Diffie-Hellman exponentiation).
class TimedSection {
 public:
  TimedSection();
  ~TimedSection();
  TimedSection(const TimedSection&) = delete;
  TimedSection& operator=(const TimedSection&) = delete;

 private:
  std::int64_t start_ = -1;
};

}  // namespace secalgo::instrument
