#include "secalgo/instrument.hpp"

#include <ctime>

namespace secalgo::instrument {

namespace {

thread_local Recorder* t_recorder = nullptr;
thread_local bool t_timed = false;
thread_local int t_depth = 0;

}  // namespace

std::string_view name(Primitive p) {
  switch (p) {
    case Primitive::keygen: return "keygen";
    case Primitive::encrypt: return "encrypt";
    case Primitive::decrypt: return "decrypt";
    case Primitive::sign: return "sign";
    case Primitive::verify: return "verify";
  }
  return "?";
}

std::uint64_t Counters::total() const {
  std::uint64_t t = 0;
  for (auto c : calls) t += c;
  return t;
}

void Recorder::count(Primitive p) {
  calls_[static_cast<std::size_t>(p)].fetch_add(1, std::memory_order_relaxed);
}

void Recorder::add_library_ns(std::int64_t ns) { library_ns_.fetch_add(ns, std::memory_order_relaxed); }

Counters Recorder::counters() const {
  Counters c;
  for (std::size_t i = 0; i < kPrimitiveCount; ++i) c.calls[i] = calls_[i].load(std::memory_order_relaxed);
  return c;
}

std::int64_t thread_cpu_ns() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<std::int64_t>(ts.tv_sec) * 1'000'000'000 + ts.tv_nsec;
}

Attach::Attach(Recorder& r, bool timed) : prev_recorder_(t_recorder), prev_timed_(t_timed) {
  t_recorder = &r;
  t_timed = timed;
}

Attach::~Attach() {
  t_recorder = prev_recorder_;
  t_timed = prev_timed_;
}

// Only the outermost primitive on a thread counts; encrypt calling sign
// internally, for instance, is still one encrypt.
Call::Call(Primitive p) {
  if (t_depth++ != 0 || !t_recorder) return;
  t_recorder->count(p);
  if (t_timed) start_ = thread_cpu_ns();
}

Call::~Call() {
  --t_depth;
  if (start_ >= 0 && t_recorder) t_recorder->add_library_ns(thread_cpu_ns() - start_);
}

TimedSection::TimedSection() {
  if (t_depth++ != 0 || !t_recorder || !t_timed) return;
  start_ = thread_cpu_ns();
}

TimedSection::~TimedSection() {
  --t_depth;
  if (start_ >= 0 && t_recorder) t_recorder->add_library_ns(thread_cpu_ns() - start_);
}

}  // namespace secalgo::instrument
