#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "aoifb/aoi.hpp"
#include "aoifb/dp.hpp"
#include "aoifb/parallel.hpp"
#include "aoifb/rng.hpp"
#include "aoifb/types.hpp"

namespace aoifb {

/// Where a successful transmission at epoch t lands on the sawtooth:
/// Instant resets at t (as in the closed-form schedule objective), Delayed
/// at t+1 (as in the DP transitions).
enum class ResetConvention { Instant, Delayed };

inline std::string_view to_string(ResetConvention c) {
  return c == ResetConvention::Instant ? "instant" : "delayed";
}

/// Mean and standard error of per-replication samples, with the sums taken
/// pairwise so the result is independent of how the samples were produced.
inline SimStats summarize(const std::vector<double>& samples, std::uint64_t seed) {
  const std::size_t n = samples.size();
  SimStats s;
  s.replications = static_cast<std::int64_t>(n);
  s.seed = seed;
  if (n == 0) return s;
  s.mean = pairwise_sum(samples.data(), n) / static_cast<double>(n);
  if (n > 1) {
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (samples[i] - s.mean) * (samples[i] - s.mean);
    const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
    s.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return s;
}

namespace detail {

inline void check_reps(std::int64_t reps) {
  if (reps < 1) throw invalid_input("replications must be >= 1");
}

inline std::vector<int> integer_instants(const IntervalSchedule& sched, int horizon) {
  if (!sched.is_integral()) throw invalid_input("simulation needs integer transmission epochs");
  std::vector<int> out;
  out.reserve(sched.updates());
  for (double tau : sched.instants()) {
    const int e = static_cast<int>(std::lround(tau));
    if (e < 0 || e >= horizon) throw invalid_input("transmission epochs must lie in [0, N)");
    if (!out.empty() && e <= out.back())
      throw invalid_input("transmission epochs must be distinct and increasing");
    out.push_back(e);
  }
  return out;
}

inline void push_reset(std::vector<double>& resets, int epoch, ResetConvention conv) {
  const int at = conv == ResetConvention::Instant ? epoch : epoch + 1;
  if (at > 0) resets.push_back(at);
}

}  // namespace detail

/// Monte Carlo average AoI of a stateless schedule on integer epochs.
/// Replication r draws its channel outcomes from stream (seed, r).
inline SimStats simulate_schedule(const ScenarioParams& params, std::span<const int> epochs,
                                  std::uint64_t seed, std::int64_t reps, ResetConvention conv,
                                  int jobs = 1) {
  detail::check_reps(reps);
  const int n = params.horizon();
  const double p = params.success_prob();
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    if (epochs[i] < 0 || epochs[i] >= n) throw invalid_input("transmission epochs must lie in [0, N)");
    if (i > 0 && epochs[i] <= epochs[i - 1])
      throw invalid_input("transmission epochs must be distinct and increasing");
  }
  std::vector<double> samples(static_cast<std::size_t>(reps));
  parallel_for(reps, jobs, [&](std::int64_t r) {
    auto rng = CounterRng::stream(seed, static_cast<std::uint64_t>(r));
    std::vector<double> resets;
    resets.reserve(epochs.size());
    for (int e : epochs)
      if (rng.bernoulli(p)) detail::push_reset(resets, e, conv);
    samples[static_cast<std::size_t>(r)] = path_average_aoi(AgeTrace(n, std::move(resets)));
  });
  return summarize(samples, seed);
}

inline SimStats simulate_schedule(const ScenarioParams& params, const IntervalSchedule& sched,
                                  std::uint64_t seed, std::int64_t reps, ResetConvention conv,
                                  int jobs = 1) {
  const auto epochs = detail::integer_instants(sched, params.horizon());
  return simulate_schedule(params, epochs, seed, reps, conv, jobs);
}

/// Per-replication statistics of an online policy run: the realized average
/// AoI under the requested reset convention, and the DP objective (total
/// stage cost under the table's own convention).
struct PolicySimStats {
  SimStats delta;
  SimStats objective;
};

inline PolicySimStats simulate_policy(const ScenarioParams& params, const PolicyTable& table,
                                      std::uint64_t seed, std::int64_t reps,
                                      ResetConvention conv, int jobs = 1) {
  detail::check_reps(reps);
  if (table.horizon() != params.horizon())
    throw invalid_input("policy table horizon does not match params.N");
  const int n = params.horizon();
  const double p = params.success_prob();
  const int budget = table.opportunities();
  const double c = detail::stage_offset(table.convention());

  std::vector<double> deltas(static_cast<std::size_t>(reps));
  std::vector<double> objectives(deltas.size());
  parallel_for(reps, jobs, [&](std::int64_t r) {
    auto rng = CounterRng::stream(seed, static_cast<std::uint64_t>(r));
    std::vector<double> resets;
    int age = 0;
    int remaining = budget;
    double objective = 0.0;
    for (int t = 0; t < n; ++t) {
      objective += age + c;
      if (remaining > 0 && table.action(t, age, remaining)) {
        --remaining;
        if (rng.bernoulli(p)) {
          detail::push_reset(resets, t, conv);
          age = 0;
          continue;
        }
      }
      ++age;
    }
    objective += detail::terminal_cost(table.convention(), age);
    deltas[static_cast<std::size_t>(r)] = path_average_aoi(AgeTrace(n, std::move(resets)));
    objectives[static_cast<std::size_t>(r)] = objective;
  });
  return {summarize(deltas, seed), summarize(objectives, seed)};
}

/// Replays the policy under a forced outcome sequence and returns the
/// transmission epochs. Outcome k applies to the k-th attempt; outcomes
/// that have zero probability under the table's p are replaced by the only
/// possible one.
inline std::vector<int> realize_policy_transmission_times(const PolicyTable& table,
                                                          std::span<const bool> outcomes) {
  const double p = table.success_prob();
  std::vector<int> epochs;
  int age = 0;
  int remaining = table.opportunities();
  for (int t = 0; t < table.horizon(); ++t) {
    if (remaining > 0 && table.action(t, age, remaining)) {
      if (epochs.size() >= outcomes.size())
        throw invalid_input("outcome pattern shorter than the number of attempts");
      bool success = outcomes[epochs.size()];
      if (p == 1.0) success = true;
      if (p == 0.0) success = false;
      epochs.push_back(t);
      --remaining;
      if (success) {
        age = 0;
        continue;
      }
    }
    ++age;
  }
  return epochs;
}

}  // namespace aoifb
