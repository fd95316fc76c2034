#include <chrono>
#include <stdexcept>

#include "secalgo/protocols.hpp"

namespace secalgo::protocols {

TimingSummary measure(std::string_view protocol, int repetitions, const MeasureOptions& options) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  using clock = std::chrono::steady_clock;

  TimingSummary s;
  s.protocol = std::string(protocol);
  s.repetitions = repetitions;
  harness::RunOptions run_opts;
  run_opts.scheduling = options.scheduling;

  double protocol_sum = 0, library_sum = 0;
  for (int rep = 0; rep < repetitions; ++rep) {
    std::uint64_t runs = 0;
    std::int64_t protocol_ns = 0, library_ns = 0;
    const auto start = clock::now();
    do {
      auto trace = run(protocol, run_opts);
      protocol_ns += trace.protocol_ns;
      library_ns += trace.library_ns;
      s.messages = trace.messages.size();
      s.calls = trace.calls;
      ++runs;
    } while (std::chrono::duration<double>(clock::now() - start).count() < options.min_seconds);

    const double p = static_cast<double>(protocol_ns) / 1e6 / static_cast<double>(runs);
    const double l = static_cast<double>(library_ns) / 1e6 / static_cast<double>(runs);
    s.per_repetition_protocol_ms.push_back(p);
    protocol_sum += p;
    library_sum += l;
    s.runs += runs;
  }
  s.protocol_ms = protocol_sum / repetitions;
  s.library_ms = library_sum / repetitions;
  return s;
}

}  // namespace secalgo::protocols
