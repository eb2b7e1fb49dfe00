#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rbe {

struct TracePoint {
  long step;
  double value;
};

struct Trace {
  std::string metric;  // msve, mave, return
  std::vector<TracePoint> points;
};

struct EpisodeRecord {
  long index;
  long end_step;  // environment step on which the episode ended
  long length;
  double ret;
  bool cutoff;
};

struct Summary {
  double final = 0.0;  // mean of trace points with step > 0.75 n_steps
  double auc = 0.0;    // mean of all trace points
};

/// One run of one configuration with one seed.
struct RunRecord {
  std::string problem;
  std::string algorithm;
  std::map<std::string, double> params;  // alpha, eta, tau, refresh, ...
  int seed_index = 0;
  std::uint64_t seed = 0;
  long n_steps = 0;
  bool diverged = false;
  long diverged_at = -1;
  std::vector<Trace> traces;
  std::vector<EpisodeRecord> episodes;

  const Trace& trace(const std::string& metric) const;
  bool has_trace(const std::string& metric) const;
};

/// Logging interval used by every runner: max(1, n_steps / 500).
long logging_interval(long n_steps);

/// Summary of a trace. A truncated (diverged) trace still summarizes what
/// it has; callers substitute the worst value during aggregation.
Summary summarize(const Trace& trace, long n_steps);

}  // namespace rbe
