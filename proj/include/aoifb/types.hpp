#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoifb {

/// Raised when an input violates a documented precondition.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the exhaustive oracles when an instance exceeds their size guard.
class instance_too_large : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The experiment tuple: horizon N, update budget M, per-attempt success
/// probability p and feedback cost coefficient eta.
///
/// Construction rejects N < 1, M outside [1, N], p outside [0, 1] and
/// negative eta. The intended regime M << N is not enforced.
class ScenarioParams {
 public:
  ScenarioParams(int horizon, int max_updates, double success_prob,
                 double feedback_cost = 0.0)
      : horizon_(horizon),
        max_updates_(max_updates),
        success_prob_(success_prob),
        feedback_cost_(feedback_cost) {
    if (horizon < 1) throw invalid_input("horizon N must be >= 1");
    if (max_updates < 1 || max_updates > horizon)
      throw invalid_input("max_updates M must lie in [1, N]");
    if (!(success_prob >= 0.0 && success_prob <= 1.0))
      throw invalid_input("success probability p must lie in [0, 1]");
    if (!(feedback_cost >= 0.0) || !std::isfinite(feedback_cost))
      throw invalid_input("feedback cost eta must be finite and >= 0");
  }

  int horizon() const noexcept { return horizon_; }
  int max_updates() const noexcept { return max_updates_; }
  double success_prob() const noexcept { return success_prob_; }
  double feedback_cost() const noexcept { return feedback_cost_; }

 private:
  int horizon_;
  int max_updates_;
  double success_prob_;
  double feedback_cost_;
};

/// A stateless schedule of M transmissions over [0, N], held both as the
/// M+1 intervals y_0..y_M and as the instants tau_1..tau_M.
///
/// Whichever representation the schedule was built from is kept verbatim;
/// the other is derived, so each conversion direction round-trips exactly.
class IntervalSchedule {
 public:
  static constexpr double kSumTolerance = 1e-9;

  static IntervalSchedule from_intervals(std::vector<double> intervals,
                                         double horizon) {
    if (intervals.empty()) throw invalid_input("schedule needs at least one interval");
    double sum = 0.0;
    for (double y : intervals) {
      if (!std::isfinite(y) || y < 0.0) throw invalid_input("intervals must be finite and >= 0");
      sum += y;
    }
    if (std::abs(sum - horizon) > kSumTolerance)
      throw invalid_input("intervals must sum to the horizon N");
    std::vector<double> instants;
    instants.reserve(intervals.size() - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
      acc += intervals[i];
      instants.push_back(acc);
    }
    return IntervalSchedule(horizon, std::move(intervals), std::move(instants));
  }

  static IntervalSchedule from_instants(std::vector<double> instants, double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw invalid_input("horizon must be > 0");
    std::vector<double> intervals;
    intervals.reserve(instants.size() + 1);
    double prev = 0.0;
    for (double tau : instants) {
      if (!std::isfinite(tau) || tau < 0.0 || tau > horizon)
        throw invalid_input("instants must lie within [0, N]");
      if (tau < prev) throw invalid_input("instants must be non-decreasing");
      intervals.push_back(tau - prev);
      prev = tau;
    }
    intervals.push_back(horizon - prev);
    return IntervalSchedule(horizon, std::move(intervals), std::move(instants));
  }

  double horizon() const noexcept { return horizon_; }
  /// Number of transmissions M.
  std::size_t updates() const noexcept { return instants_.size(); }
  std::span<const double> intervals() const noexcept { return intervals_; }
  std::span<const double> instants() const noexcept { return instants_; }

  bool is_integral(double tol = 1e-9) const noexcept {
    for (double tau : instants_)
      if (std::abs(tau - std::round(tau)) > tol) return false;
    return true;
  }

 private:
  IntervalSchedule(double horizon, std::vector<double> intervals, std::vector<double> instants)
      : horizon_(horizon), intervals_(std::move(intervals)), instants_(std::move(instants)) {}

  double horizon_;
  std::vector<double> intervals_;
  std::vector<double> instants_;
};

inline IntervalSchedule instants_to_intervals(std::span<const double> instants, double horizon) {
  return IntervalSchedule::from_instants({instants.begin(), instants.end()}, horizon);
}

inline std::vector<double> intervals_to_instants(const IntervalSchedule& sched) {
  auto s = sched.instants();
  return {s.begin(), s.end()};
}

/// A realized AoI sawtooth over [0, N]: the age drops to zero at every
/// reset instant and grows with unit slope otherwise. An empty trace means
/// no update was ever received.
class AgeTrace {
 public:
  AgeTrace(double horizon, std::vector<double> reset_instants)
      : horizon_(horizon), resets_(std::move(reset_instants)) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw invalid_input("trace horizon must be > 0");
    double prev = 0.0;
    for (double r : resets_) {
      if (!(r > prev) || r > horizon)
        throw invalid_input("reset instants must be strictly increasing within (0, N]");
      prev = r;
    }
  }

  double horizon() const noexcept { return horizon_; }
  std::span<const double> resets() const noexcept { return resets_; }

  /// A(t) = t - sigma(t), sigma(t) the latest reset <= t (0 before the first).
  double age_at(double t) const noexcept {
    double sigma = 0.0;
    for (double r : resets_) {
      if (r > t) break;
      sigma = r;
    }
    return t - sigma;
  }

 private:
  double horizon_;
  std::vector<double> resets_;
};

/// Monte Carlo summary of one estimator.
struct SimStats {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(replications)
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
};

}  // namespace aoifb
