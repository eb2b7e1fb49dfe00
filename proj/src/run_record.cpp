#include "rbe/run_record.hpp"

#include <limits>

#include "rbe/errors.hpp"

namespace rbe {

const Trace& RunRecord::trace(const std::string& metric) const {
  for (const auto& t : traces) {
    if (t.metric == metric) return t;
  }
  throw Error("run has no trace for metric '" + metric + "'");
}

bool RunRecord::has_trace(const std::string& metric) const {
  for (const auto& t : traces) {
    if (t.metric == metric) return true;
  }
  return false;
}

long logging_interval(long n_steps) { return std::max(1L, n_steps / 500); }

Summary summarize(const Trace& trace, long n_steps) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  Summary out{nan, nan};
  if (trace.points.empty()) return out;
  const double cut = 0.75 * static_cast<double>(n_steps);
  double all = 0.0;
  double tail = 0.0;
  long n_tail = 0;
  for (const auto& p : trace.points) {
    all += p.value;
    if (static_cast<double>(p.step) > cut) {
      tail += p.value;
      ++n_tail;
    }
  }
  out.auc = all / static_cast<double>(trace.points.size());
  if (n_tail > 0) out.final = tail / static_cast<double>(n_tail);
  return out;
}

}  // namespace rbe
