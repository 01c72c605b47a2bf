#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "aoifb/dp.hpp"
#include "aoifb/offline.hpp"
#include "aoifb/parallel.hpp"
#include "aoifb/types.hpp"

namespace aoifb {

/// How M/(1+eta) becomes an integer budget.
enum class BudgetRounding { Floor, Round };

/// Which objectives the two strategies are scored with.
///
/// Paper: no-feedback by the closed form at the continuous optimum,
/// feedback by the PaperLiteral DP value / N.
/// Unified: both scored as ContinuousArea expectations (resets at t+1);
/// no-feedback uses the epoch-rounded optimal schedule, which is then a
/// feasible policy of the same DP.
enum class ComparisonPreset { Paper, Unified };

enum class Winner { Feedback, NoFeedback, Tie };

inline std::string_view to_string(Winner w) {
  switch (w) {
    case Winner::Feedback: return "feedback";
    case Winner::NoFeedback: return "nofeedback";
    default: return "tie";
  }
}

inline std::string_view to_string(ComparisonPreset c) {
  return c == ComparisonPreset::Paper ? "paper" : "unified";
}

struct RegionCell {
  double p;
  double eta;
  int m_f;
  double delta_nofeedback;
  double delta_feedback;
  Winner winner;
};

inline constexpr double kTieTolerance = 1e-9;

inline Winner decide_winner(double delta_nofeedback, double delta_feedback) {
  const double scale = std::max(std::abs(delta_nofeedback), std::abs(delta_feedback));
  if (std::abs(delta_nofeedback - delta_feedback) <= kTieTolerance * scale) return Winner::Tie;
  return delta_feedback < delta_nofeedback ? Winner::Feedback : Winner::NoFeedback;
}

/// Transmission budget left once every update also pays for its feedback.
/// The 1e-9 slack keeps grid values just above a breakpoint M/k - 1 on it.
inline int effective_opportunities(int max_updates, double eta,
                                   BudgetRounding rule = BudgetRounding::Floor) {
  if (max_updates < 1) throw invalid_input("M must be >= 1");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw invalid_input("eta must be finite and >= 0");
  const double raw = max_updates / (1.0 + eta);
  const double snapped = rule == BudgetRounding::Floor ? std::floor(raw + 1e-9) : std::round(raw);
  return std::clamp(static_cast<int>(snapped), 0, max_updates);
}

/// Everything a (p, eta) cell needs at fixed (N, M, p): the no-feedback
/// score and the feedback score for every budget 0..M.
struct StrategyScores {
  double p;
  double delta_nofeedback;
  std::vector<double> delta_feedback;  // indexed by M_f
};

inline StrategyScores score_strategies(int horizon, int max_updates, double p,
                                       ComparisonPreset preset) {
  const ScenarioParams params(horizon, max_updates, p);
  const auto offline = solve_offline_schedule(params);
  const StageCost conv =
      preset == ComparisonPreset::Paper ? StageCost::PaperLiteral : StageCost::ContinuousArea;

  StrategyScores out{p, offline.delta, {}};
  if (preset == ComparisonPreset::Unified) {
    const auto rounded = round_schedule_to_epochs(params, offline.schedule);
    std::vector<int> epochs;
    for (double tau : rounded.instants()) epochs.push_back(static_cast<int>(std::lround(tau)));
    out.delta_nofeedback =
        evaluate_fixed_schedule_expected_cost(horizon, p, epochs, conv) / horizon;
  }
  // R_0(0, m) for a smaller budget m never depends on larger budgets, so
  // one full-budget pass scores every M_f.
  const auto table = build_policy(horizon, max_updates, p, conv);
  for (double r : table.initial_costs()) out.delta_feedback.push_back(r / horizon);
  return out;
}

inline RegionCell make_cell(const StrategyScores& scores, int max_updates, double eta,
                            BudgetRounding rule) {
  const int mf = effective_opportunities(max_updates, eta, rule);
  const double fb = scores.delta_feedback.at(static_cast<std::size_t>(mf));
  return {scores.p, eta, mf, scores.delta_nofeedback, fb,
          decide_winner(scores.delta_nofeedback, fb)};
}

inline RegionCell compare_strategies(int horizon, int max_updates, double p, double eta,
                                     ComparisonPreset preset = ComparisonPreset::Paper,
                                     BudgetRounding rule = BudgetRounding::Floor) {
  [[maybe_unused]] const ScenarioParams params(horizon, max_updates, p, eta);
  const auto scores = score_strategies(horizon, max_updates, p, preset);
  return make_cell(scores, max_updates, eta, rule);
}

/// Cross product of the grids, p-major. DP work is shared per p.
inline std::vector<RegionCell> sweep_region(int horizon, int max_updates,
                                            std::span<const double> p_grid,
                                            std::span<const double> eta_grid,
                                            ComparisonPreset preset = ComparisonPreset::Paper,
                                            BudgetRounding rule = BudgetRounding::Floor,
                                            int jobs = 1) {
  for (double eta : eta_grid) (void)ScenarioParams(horizon, max_updates, 0.5, eta);
  std::vector<StrategyScores> cache(p_grid.size());
  parallel_for(static_cast<std::int64_t>(p_grid.size()), jobs, [&](std::int64_t i) {
    cache[static_cast<std::size_t>(i)] = score_strategies(horizon, max_updates, p_grid[i], preset);
  });
  std::vector<RegionCell> cells;
  cells.reserve(p_grid.size() * eta_grid.size());
  for (const auto& scores : cache)
    for (double eta : eta_grid) cells.push_back(make_cell(scores, max_updates, eta, rule));
  return cells;
}

}  // namespace aoifb
