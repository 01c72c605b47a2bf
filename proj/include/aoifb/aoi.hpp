#pragma once

#include <span>

#include "aoifb/types.hpp"

namespace aoifb {

/// Time-normalized area under the sawtooth of a realized trace, summed
/// exactly as one triangle per inter-reset segment.
inline double path_average_aoi(const AgeTrace& trace) {
  double area = 0.0;
  double prev = 0.0;
  for (double r : trace.resets()) {
    const double seg = r - prev;
    area += 0.5 * seg * seg;
    prev = r;
  }
  const double tail = trace.horizon() - prev;
  area += 0.5 * tail * tail;
  return area / trace.horizon();
}

/// Expected average AoI of a stateless schedule given by its intervals.
///
/// Interval y_i always contributes its own triangle y_i^2/2; it also adds
/// the parallelogram y_i*y_j to a later interval j whenever the j-i
/// transmissions in between all fail, i.e. with weight (1-p)^(j-i).
/// The inner sums are accumulated backwards, so the cost is O(M).
inline double expected_schedule_aoi(std::span<const double> intervals, double horizon,
                                    double success_prob) {
  const double q = 1.0 - success_prob;
  double area = 0.0;
  double tail = 0.0;  // sum_{j>i} y_j q^(j-i)
  for (std::size_t k = intervals.size(); k-- > 0;) {
    const double y = intervals[k];
    area += 0.5 * y * y + y * tail;
    tail = q * (y + tail);
  }
  return area / horizon;
}

inline double expected_schedule_aoi(const ScenarioParams& params, const IntervalSchedule& sched) {
  if (sched.updates() != static_cast<std::size_t>(params.max_updates()))
    throw invalid_input("schedule has " + std::to_string(sched.updates()) +
                        " transmissions but params.M = " + std::to_string(params.max_updates()));
  if (std::abs(sched.horizon() - params.horizon()) > IntervalSchedule::kSumTolerance)
    throw invalid_input("schedule horizon does not match params.N");
  return expected_schedule_aoi(sched.intervals(), params.horizon(), params.success_prob());
}

}  // namespace aoifb
