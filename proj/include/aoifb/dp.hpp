#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aoifb/types.hpp"

namespace aoifb {

/// How the online objective charges age per epoch.
///
/// PaperLiteral: stage cost A(t) for t = 0..N, terminal age included.
/// ContinuousArea: stage cost A(t) + 1/2 for t = 0..N-1, the exact
/// sawtooth area of the slot, so R_0/N equals the average AoI of the
/// trace with resets at t+1.
enum class StageCost : std::uint8_t { PaperLiteral = 0, ContinuousArea = 1 };

inline std::string_view to_string(StageCost c) {
  return c == StageCost::PaperLiteral ? "paper-literal" : "continuous-area";
}

namespace detail {

inline double stage_offset(StageCost c) { return c == StageCost::ContinuousArea ? 0.5 : 0.0; }

inline double terminal_cost(StageCost c, double age) {
  return c == StageCost::PaperLiteral ? age : 0.0;
}

// Bellman indicator: transmit only if strictly cheaper, with a relative
// slack so exact ties defer regardless of rounding.
inline bool strictly_cheaper(double transmit, double wait) {
  return transmit < wait - 1e-12 * std::max(1.0, std::abs(wait));
}

inline void check_policy_args(int horizon, int opportunities, double p) {
  if (horizon < 1) throw invalid_input("horizon N must be >= 1");
  if (opportunities < 0 || opportunities > horizon)
    throw invalid_input("opportunities M_f must lie in [0, N]");
  if (!(p >= 0.0 && p <= 1.0)) throw invalid_input("p must lie in [0, 1]");
}

}  // namespace detail

/// Optimal online transmission rule mu_t(A, m) over every reachable
/// state t in [0, N), A in [0, t], m in [0, M_f], stored as packed bits
/// ordered (t, m, A). Also carries R_0(0, m) for every m <= M_f and,
/// optionally, the full cost-to-go table.
class PolicyTable {
 public:
  PolicyTable(int horizon, int opportunities, double success_prob, StageCost convention)
      : horizon_((detail::check_policy_args(horizon, opportunities, success_prob), horizon)),
        opportunities_(opportunities),
        success_prob_(success_prob),
        convention_(convention),
        bits_((state_count() + 7) / 8, 0) {}

  int horizon() const noexcept { return horizon_; }
  int opportunities() const noexcept { return opportunities_; }
  double success_prob() const noexcept { return success_prob_; }
  StageCost convention() const noexcept { return convention_; }

  /// Number of (t, m, A) states with t < N.
  std::uint64_t state_count() const noexcept { return offset(horizon_); }

  std::uint64_t index(int t, int age, int remaining) const {
    if (t < 0 || t >= horizon_ || age < 0 || age > t || remaining < 0 ||
        remaining > opportunities_)
      throw std::out_of_range("unreachable policy state (t=" + std::to_string(t) +
                              ", A=" + std::to_string(age) + ", m=" + std::to_string(remaining) + ")");
    return offset(t) + static_cast<std::uint64_t>(remaining) * (t + 1) + age;
  }

  bool action(int t, int age, int remaining) const {
    const auto k = index(t, age, remaining);
    return (bits_[k >> 3] >> (k & 7)) & 1u;
  }

  void set_action(int t, int age, int remaining, bool transmit) {
    const auto k = index(t, age, remaining);
    const auto mask = static_cast<std::uint8_t>(1u << (k & 7));
    if (transmit)
      bits_[k >> 3] |= mask;
    else
      bits_[k >> 3] &= static_cast<std::uint8_t>(~mask);
  }

  std::span<const std::uint8_t> packed_bits() const& noexcept { return bits_; }
  std::span<std::uint8_t> packed_bits() & noexcept { return bits_; }
  std::span<const std::uint8_t> packed_bits() && = delete;

  bool has_initial_costs() const noexcept { return !initial_costs_.empty(); }
  /// R_0(0, m) for m = 0..M_f.
  std::span<const double> initial_costs() const& noexcept { return initial_costs_; }
  std::span<const double> initial_costs() && = delete;
  void set_initial_costs(std::vector<double> costs) { initial_costs_ = std::move(costs); }

  bool has_values() const noexcept { return !values_.empty(); }
  /// R_t(A, m); available only when the table was built with keep_values.
  double value(int t, int age, int remaining) const {
    if (!has_values()) throw std::logic_error("cost-to-go table was not retained");
    return values_[index(t, age, remaining)];
  }
  void set_values(std::vector<double> values) { values_ = std::move(values); }

 private:
  std::uint64_t offset(int t) const noexcept {
    const auto tt = static_cast<std::uint64_t>(t);
    return static_cast<std::uint64_t>(opportunities_ + 1) * (tt * (tt + 1) / 2);
  }

  int horizon_;
  int opportunities_;
  double success_prob_;
  StageCost convention_;
  std::vector<std::uint8_t> bits_;
  std::vector<double> initial_costs_;
  std::vector<double> values_;
};

struct BuildOptions {
  bool keep_values = false;
};

/// Backward induction over (t, A, m).
///
/// Transitions: wait -> (A+1, m); transmit and fail (1-p) -> (A+1, m-1);
/// transmit and succeed (p) -> (0, m-1). At t = N-1 every state with m > 0
/// transmits; with m = 0 nothing is sent. Elsewhere the strict indicator
/// picks the action, so ties defer.
inline PolicyTable build_policy(int horizon, int opportunities, double success_prob,
                                StageCost convention, BuildOptions options = {}) {
  detail::check_policy_args(horizon, opportunities, success_prob);
  PolicyTable table(horizon, opportunities, success_prob, convention);

  const int n = horizon;
  const int mf = opportunities;
  const double p = success_prob;
  const double q = 1.0 - p;
  const double c = detail::stage_offset(convention);
  const auto width = static_cast<std::size_t>(n) + 1;

  // next[m * width + A] = R_{t+1}(A, m)
  std::vector<double> next(static_cast<std::size_t>(mf + 1) * width);
  std::vector<double> cur(next.size());
  for (int m = 0; m <= mf; ++m)
    for (int a = 0; a <= n; ++a) next[m * width + a] = detail::terminal_cost(convention, a);

  std::vector<double> values;
  if (options.keep_values) values.resize(table.state_count());

  for (int t = n - 1; t >= 0; --t) {
    for (int m = 0; m <= mf; ++m) {
      const double* nm = &next[m * width];
      const double* nm1 = m > 0 ? &next[(m - 1) * width] : nullptr;
      double* out = &cur[m * width];
      for (int a = 0; a <= t; ++a) {
        const double stage = a + c;
        const double wait = stage + nm[a + 1];
        bool transmit = false;
        double best = wait;
        if (m > 0) {
          const double tx = stage + q * nm1[a + 1] + p * nm1[0];
          transmit = (t == n - 1) || detail::strictly_cheaper(tx, wait);
          if (transmit) best = tx;
        }
        out[a] = best;
        if (transmit) table.set_action(t, a, m, true);
        if (options.keep_values) values[table.index(t, a, m)] = best;
      }
    }
    std::swap(next, cur);
  }

  std::vector<double> initial(static_cast<std::size_t>(mf) + 1);
  for (int m = 0; m <= mf; ++m) initial[m] = next[m * width];
  table.set_initial_costs(std::move(initial));
  if (options.keep_values) table.set_values(std::move(values));
  return table;
}

inline bool query_action(const PolicyTable& table, int t, int age, int remaining) {
  return table.action(t, age, remaining);
}

/// R_0(0, M_f): optimal expected total age under the table's convention.
inline double expected_policy_cost(const PolicyTable& table) {
  if (!table.has_initial_costs()) throw std::logic_error("policy table carries no cost values");
  return table.initial_costs().back();
}

/// R_0(0, M_f) / N. Under ContinuousArea this is exactly the expected
/// average AoI; under PaperLiteral it is the per-epoch objective.
inline double expected_policy_delta(const PolicyTable& table) {
  return expected_policy_cost(table) / table.horizon();
}

/// Exact expected objective of an open-loop schedule that fires at the
/// given epochs whatever the outcomes, by forward propagation of the age
/// distribution (at most M+1 support points).
inline double evaluate_fixed_schedule_expected_cost(int horizon, double success_prob,
                                                    std::span<const int> instants,
                                                    StageCost convention) {
  if (horizon < 1) throw invalid_input("horizon N must be >= 1");
  if (!(success_prob >= 0.0 && success_prob <= 1.0)) throw invalid_input("p must lie in [0, 1]");
  for (std::size_t i = 0; i < instants.size(); ++i) {
    if (instants[i] < 0 || instants[i] >= horizon)
      throw invalid_input("fixed-schedule instants must lie in [0, N)");
    if (i > 0 && instants[i] <= instants[i - 1])
      throw invalid_input("fixed-schedule instants must be strictly increasing");
  }
  const double p = success_prob;
  const double c = detail::stage_offset(convention);

  std::vector<std::pair<int, double>> dist{{0, 1.0}};  // (age, probability)
  double cost = 0.0;
  std::size_t next_tx = 0;
  for (int t = 0; t < horizon; ++t) {
    for (const auto& [age, prob] : dist) cost += prob * (age + c);
    const bool fire = next_tx < instants.size() && instants[next_tx] == t;
    if (fire) ++next_tx;
    double reset_mass = 0.0;
    for (auto& [age, prob] : dist) {
      ++age;
      if (fire) {
        reset_mass += prob * p;
        prob *= 1.0 - p;
      }
    }
    if (fire) {
      std::erase_if(dist, [](const auto& e) { return e.second == 0.0; });
      if (reset_mass > 0.0) dist.emplace_back(0, reset_mass);
    }
  }
  for (const auto& [age, prob] : dist) cost += prob * detail::terminal_cost(convention, age);
  return cost;
}

namespace detail {

// Nodes in the full history tree: at depth t a history is a choice of
// k <= min(t, M_f) transmission epochs, each with a success/failure outcome.
inline double history_tree_size(int horizon, int opportunities) {
  double total = 0.0;
  for (int t = 0; t <= horizon; ++t) {
    double binom = 1.0;
    for (int k = 0; k <= std::min(t, opportunities); ++k) {
      if (k > 0) binom = binom * (t - k + 1) / k;
      total += binom * std::pow(2.0, k);
    }
  }
  return total;
}

}  // namespace detail

/// Minimal expected objective over all history-dependent policies, by
/// expectimin over the complete history tree. Each node recomputes age and
/// remaining budget from its own event log, sharing nothing with the
/// (A, m) state aggregation of build_policy. Refuses trees above 1e6 nodes.
inline double enumerate_policies_oracle(int horizon, int opportunities, double success_prob,
                                        StageCost convention = StageCost::PaperLiteral) {
  detail::check_policy_args(horizon, opportunities, success_prob);
  const double size = detail::history_tree_size(horizon, opportunities);
  if (size > 1e6)
    throw instance_too_large("policy oracle refused: history tree of " + std::to_string(size) +
                             " nodes exceeds 1e6");

  struct Event {
    int epoch;
    bool success;
  };
  std::vector<Event> log;
  const double p = success_prob;
  const double c = detail::stage_offset(convention);

  std::function<double(int)> solve = [&](int t) -> double {
    int last_reception = 0;
    for (const auto& e : log)
      if (e.success) last_reception = e.epoch + 1;
    const int age = t - last_reception;
    if (t == horizon) return detail::terminal_cost(convention, age);
    const int remaining = opportunities - static_cast<int>(log.size());

    const double wait = solve(t + 1);
    double best = wait;
    if (remaining > 0) {
      double tx = 0.0;
      for (bool outcome : {true, false}) {
        const double w = outcome ? p : 1.0 - p;
        if (w == 0.0) continue;
        log.push_back({t, outcome});
        tx += w * solve(t + 1);
        log.pop_back();
      }
      best = std::min(best, tx);
    }
    return age + c + best;
  };
  return solve(0);
}

}  // namespace aoifb
