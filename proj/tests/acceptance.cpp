// Acceptance suite: one PASS/FAIL line per criterion.
//
//   aoifb_acceptance            run every criterion
//   aoifb_acceptance 4 9        run a subset
//
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "aoifb/aoifb.hpp"
#include "oracles.hpp"

using namespace aoifb;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> p_grid_019() {
  std::vector<double> g;
  for (int k = 1; k <= 19; ++k) g.push_back(k / 20.0);
  return g;
}

std::vector<double> eta_grid_011() {
  std::vector<double> g;
  for (int k = 0; k <= 10; ++k) g.push_back(k / 10.0);
  return g;
}

int worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

constexpr int kN = 1000;
constexpr int kM = 10;

// 1
Verdict uniform_optimum() {
  Verdict v;
  const auto sol = solve_offline_schedule(ScenarioParams(100, 4, 1.0));
  const double want[] = {20, 40, 60, 80};
  double err = 0.0;
  for (int i = 0; i < 4; ++i) err = std::max(err, std::abs(sol.schedule.instants()[i] - want[i]));
  v.require(err <= 1e-9, "max |tau - uniform| = " + fmt("%.3g", err));
  v.require(std::abs(sol.delta - 10.0) <= 1e-9, "Delta = " + fmt("%.12g", sol.delta));
  return v;
}

// 2
Verdict closed_form_anchors() {
  Verdict v;
  double e1 = 0.0, e2 = 0.0;
  for (int n : {100, 1000})
    for (int k = 1; k <= 9; ++k) {
      const double p = k / 10.0;
      const auto one = solve_offline_schedule(ScenarioParams(n, 1, p));
      e1 = std::max(e1, std::abs(one.schedule.instants()[0] - n / 2.0) / n);
      const auto two = solve_offline_schedule(ScenarioParams(n, 2, p));
      const auto y = two.schedule.intervals();
      e2 = std::max({e2, std::abs(y[0] - n / (2 + p)) / n, std::abs(y[2] - n / (2 + p)) / n});
    }
  v.require(e1 <= 1e-9, "M=1 max error/N = " + fmt("%.3g", e1));
  v.require(e2 <= 1e-9, "M=2 max error/N = " + fmt("%.3g", e2));
  return v;
}

// 3
Verdict gradient_and_oracle() {
  Verdict v;
  double worst_grad = 0.0;
  auto track = [&](const OfflineSolution& s, int n) {
    worst_grad = std::max(worst_grad, s.gradient_norm / n);
  };
  int instances = 0, beaten = 0;
  double worst_gap = -1e300;
  for (int n = 1; n <= 12; ++n)
    for (int m = 1; m <= std::min(3, n); ++m)
      for (double p : {0.25, 0.5, 0.75}) {
        const ScenarioParams params(n, m, p);
        const auto sol = solve_offline_schedule(params);
        track(sol, n);
        const auto best = brute_force_offline_oracle(params, 1.0);
        ++instances;
        worst_gap = std::max(worst_gap, sol.delta - best.delta);
        if (sol.delta > best.delta + 1e-12 * best.delta) ++beaten;
      }
  for (int m = 1; m <= 20; ++m)
    for (double p : p_grid_019()) track(solve_offline_schedule(ScenarioParams(kN, m, p)), kN);
  v.require(worst_grad <= 1e-9, "max gradient norm/N = " + fmt("%.3g", worst_grad));
  v.require(beaten == 0, std::to_string(instances) + " oracle instances, solver worse on " +
                             std::to_string(beaten) + " (max solver-oracle " +
                             fmt("%.3g", worst_gap) + ")");
  return v;
}

// 4
Verdict dp_matches_exhaustive_search() {
  Verdict v;
  int instances = 0;
  double worst = 0.0;
  for (StageCost conv : {StageCost::PaperLiteral, StageCost::ContinuousArea})
    for (int n = 1; n <= 8; ++n)
      for (int mf = 0; mf <= std::min(3, n); ++mf)
        for (double p : {0.25, 0.5, 0.75}) {
          const double dp = expected_policy_cost(build_policy(n, mf, p, conv));
          const double ex = enumerate_policies_oracle(n, mf, p, conv);
          worst = std::max(worst, std::abs(dp - ex));
          ++instances;
        }
  v.require(worst <= 1e-12, std::to_string(instances) + " instances, max |DP - oracle| = " +
                                fmt("%.3g", worst));
  const double r = expected_policy_cost(build_policy(3, 1, 0.5, StageCost::PaperLiteral));
  v.require(r == 4.0, "N=3 M_f=1 p=0.5 value " + fmt("%.17g", r));
  return v;
}

// 5
Verdict dominance_at_zero_cost() {
  Verdict v;
  const auto ps = p_grid_019();
  std::vector<StrategyScores> s(ps.size());
  parallel_for(static_cast<std::int64_t>(ps.size()), worker_count(), [&](std::int64_t i) {
    s[i] = score_strategies(kN, kM, ps[i], ComparisonPreset::Unified);
  });
  int violations = 0, strict = 0;
  double best_gain = 0.0;
  for (const auto& x : s) {
    const double fb = x.delta_feedback[kM];
    if (fb > x.delta_nofeedback + kTieTolerance * x.delta_nofeedback) ++violations;
    if (x.p > 0.0 && x.p < 1.0 && decide_winner(x.delta_nofeedback, fb) == Winner::Feedback) ++strict;
    best_gain = std::max(best_gain, x.delta_nofeedback - fb);
  }
  v.require(violations == 0, "feedback worse at " + std::to_string(violations) + " of 19 p");
  v.require(strict > 0, "strictly better at " + std::to_string(strict) + " p (max gain " +
                            fmt("%.4g", best_gain) + " epochs)");
  return v;
}

struct PaperScores {
  std::vector<double> ps;
  std::vector<StrategyScores> scores;
};

const PaperScores& paper_scores() {
  static const PaperScores cache = [] {
    PaperScores out{p_grid_019(), {}};
    out.scores.resize(out.ps.size());
    parallel_for(static_cast<std::int64_t>(out.ps.size()), worker_count(), [&](std::int64_t i) {
      out.scores[i] = score_strategies(kN, kM, out.ps[i], ComparisonPreset::Paper);
    });
    return out;
  }();
  return cache;
}

// 6
Verdict fig3_claims() {
  Verdict v;
  const auto& ps = paper_scores();
  double best = -1e300, at = 0.0;
  for (const auto& s : ps.scores) {
    const double gain = (s.delta_nofeedback - s.delta_feedback[kM]) / s.delta_nofeedback;
    if (gain > best) {
      best = gain;
      at = s.p;
    }
  }
  v.require(std::abs(best - 0.35) <= 0.05,
            "max reduction at eta=0 " + fmt("%.1f%%", 100 * best) + " at p=" + fmt("%.2f", at) +
                " (target 35% +- 5)");

  // Crossover: smallest grid p from which NoFeedback wins at every larger
  // grid p, with NoFeedback losing just below it.
  std::vector<Winner> w;
  for (const auto& s : ps.scores) w.push_back(make_cell(s, kM, 0.4, BudgetRounding::Floor).winner);
  std::size_t k = w.size();
  while (k > 0 && w[k - 1] == Winner::NoFeedback) --k;
  std::string where;
  bool ok = false;
  if (k == w.size()) {
    where = "no-feedback never wins";
  } else if (k == 0) {
    where = "no-feedback wins at every p (no crossover)";
  } else {
    const double cross = ps.ps[k];
    ok = std::abs(cross - 0.75) <= 0.05 + 1e-12;
    where = "no-feedback wins for p >= " + fmt("%.2f", cross);
  }
  v.require(ok, "eta=0.4 (M_f=7): " + where + " (target crossover 0.75 +- 0.05)");
  return v;
}

// 7
Verdict fig4_claims() {
  Verdict v;
  const auto s = score_strategies(kN, kM, 0.9, ComparisonPreset::Paper);
  const auto cell = make_cell(s, kM, 1.0, BudgetRounding::Floor);
  const double loss = cell.delta_feedback / cell.delta_nofeedback - 1.0;
  v.require(std::abs(loss - 0.60) <= 0.10,
            "p=0.9 eta=1 loss " + fmt("%.1f%%", 100 * loss) + " (target 60% +- 10)");
  bool mono = true;
  double prev = -1e300;
  for (double p : {0.7, 0.9}) {
    const auto sc = score_strategies(kN, kM, p, ComparisonPreset::Paper);
    prev = -1e300;
    for (double eta : eta_grid_011()) {
      const double fb = make_cell(sc, kM, eta, BudgetRounding::Floor).delta_feedback;
      if (fb < prev) mono = false;
      prev = fb;
    }
  }
  v.require(mono, "feedback Delta non-decreasing over eta 0:1:0.1 at p=0.7 and 0.9");
  return v;
}

// 8
Verdict fig5_properties() {
  Verdict v;
  const auto ps = p_grid_019();
  const auto etas = eta_grid_011();
  const auto cells =
      sweep_region(kN, kM, ps, etas, ComparisonPreset::Paper, BudgetRounding::Floor, worker_count());
  auto at = [&](std::size_t ip, std::size_t ie) -> const RegionCell& {
    return cells[ip * etas.size() + ie];
  };
  int non_monotone = 0, stair_breaks = 0, low_p_losses = 0;
  std::string first_loss;
  for (std::size_t ip = 0; ip < ps.size(); ++ip) {
    bool lost = false;
    for (std::size_t ie = 0; ie < etas.size(); ++ie) {
      const auto& c = at(ip, ie);
      if (lost && c.winner != Winner::NoFeedback) ++non_monotone;
      lost = lost || c.winner == Winner::NoFeedback;
      if (ie > 0 && c.m_f == at(ip, ie - 1).m_f &&
          (c.winner != at(ip, ie - 1).winner || c.delta_feedback != at(ip, ie - 1).delta_feedback))
        ++stair_breaks;
      if (ps[ip] <= 0.3 + 1e-12 && etas[ie] <= 0.5 + 1e-12 && c.winner != Winner::Feedback) {
        if (low_p_losses++ == 0)
          first_loss = "p=" + fmt("%.2f", ps[ip]) + " eta=" + fmt("%.1f", etas[ie]) +
                       " M_f=" + std::to_string(c.m_f) + " ratio " +
                       fmt("%.4f", c.delta_feedback / c.delta_nofeedback);
      }
    }
  }
  v.require(non_monotone == 0, "(a) monotone in eta, " + std::to_string(non_monotone) + " reversals");
  v.require(stair_breaks == 0,
            "(b) constant between M_f breakpoints, " + std::to_string(stair_breaks) + " breaks");
  v.require(low_p_losses == 0, "(c) feedback wins for p<=0.3, eta<=0.5: " +
                                   std::to_string(low_p_losses) + " of 30 cells not won" +
                                   (first_loss.empty() ? "" : " (e.g. " + first_loss + ")"));
  return v;
}

// 9
Verdict monte_carlo_consistency() {
  Verdict v;
  const int jobs = worker_count();
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> up(0.05, 0.95);
  int sched_ok = 0;
  double worst_z = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = 100 + 50 * k;
    const int m = 1 + k % 10;
    const double p = up(rng);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> e;
    while (static_cast<int>(e.size()) < m) {
      const int x = pick(rng);
      if (std::find(e.begin(), e.end(), x) == e.end()) e.push_back(x);
    }
    std::sort(e.begin(), e.end());
    const ScenarioParams params(n, m, p);
    const std::vector<double> inst(e.begin(), e.end());
    const double want = expected_schedule_aoi(params, IntervalSchedule::from_instants(inst, n));
    const auto s = simulate_schedule(params, e, 7000 + k, 100000, ResetConvention::Instant, jobs);
    const double z = std::abs(s.mean - want) / s.std_error;
    worst_z = std::max(worst_z, z);
    if (z <= 3.0) ++sched_ok;
  }
  v.require(sched_ok == 20, "schedules within 3 stderr: " + std::to_string(sched_ok) +
                                "/20 (max z " + fmt("%.2f", worst_z) + ")");

  int pol_ok = 0;
  double worst_pz = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int n = 20 + 40 * k;
    const int mf = 1 + k % 5;
    const double p = up(rng);
    const StageCost conv = k % 2 ? StageCost::ContinuousArea : StageCost::PaperLiteral;
    const auto table = build_policy(n, mf, p, conv);
    const auto s = simulate_policy(ScenarioParams(n, mf, p), table, 9000 + k, 100000,
                                   ResetConvention::Delayed, jobs);
    const double z = std::abs(s.objective.mean - expected_policy_cost(table)) / s.objective.std_error;
    worst_pz = std::max(worst_pz, z);
    if (z <= 3.0) ++pol_ok;
  }
  v.require(pol_ok == 10, "policies within 3 stderr: " + std::to_string(pol_ok) + "/10 (max z " +
                              fmt("%.2f", worst_pz) + ")");

  const ScenarioParams params(500, 5, 0.6);
  const std::vector<int> e{80, 170, 250, 330, 420};
  const auto a = simulate_schedule(params, e, 42, 50000, ResetConvention::Instant, 1);
  const auto b = simulate_schedule(params, e, 42, 50000, ResetConvention::Instant, jobs);
  const auto table = build_policy(500, 5, 0.6, StageCost::PaperLiteral);
  const auto c = simulate_policy(params, table, 42, 50000, ResetConvention::Delayed, 1);
  const auto d = simulate_policy(params, table, 42, 50000, ResetConvention::Delayed, jobs);
  const bool same = a.mean == b.mean && a.std_error == b.std_error &&
                    c.delta.mean == d.delta.mean && c.objective.mean == d.objective.mean &&
                    c.objective.std_error == d.objective.std_error;
  v.require(same, "bit-identical reruns");
  return v;
}

// 10
Verdict property_suites() {
  Verdict v;
  double pal = 0.0, fd = 0.0, half = 0.0;
  for (int m = 1; m <= 10; ++m)
    for (double p : p_grid_019()) {
      const auto sol = solve_offline_schedule(ScenarioParams(kN, m, p));
      const auto y = sol.schedule.intervals();
      for (int i = 0; i <= m; ++i) pal = std::max(pal, std::abs(y[i] - y[m - i]));
      const std::vector<double> yy(y.begin(), y.end());
      const auto g = reduced_gradient(yy, kN, p);
      const auto h = oracle::fd_reduced_gradient(yy, kN, p);
      for (std::size_t i = 0; i < g.size(); ++i) fd = std::max(fd, std::abs(g[i] - h[i]) / kN);
    }
  std::mt19937_64 rng(5);
  for (int t = 0; t < 500; ++t) {
    const double n = 10.0 + t;
    const auto y = oracle::random_intervals(rng, 1 + t % 12, n);
    half = std::max(half, std::abs(expected_schedule_aoi(y, n, 0.0) - n / 2) / (n / 2));
  }
  int mono = 0;
  for (StageCost conv : {StageCost::PaperLiteral, StageCost::ContinuousArea})
    for (double p : {0.2, 0.5, 0.9}) {
      const int n = 60, mf = 4;
      const auto t = build_policy(n, mf, p, conv, {.keep_values = true});
      for (int e = 0; e < n; ++e)
        for (int m = 0; m <= mf; ++m)
          for (int a = 0; a <= e; ++a) {
            if (a > 0 && t.value(e, a, m) < t.value(e, a - 1, m) - 1e-12) ++mono;
            if (m > 0 && t.value(e, a, m) > t.value(e, a, m - 1) + 1e-12) ++mono;
          }
    }
  v.require(pal <= 1e-9, "palindrome max |y_i - y_{M-i}| = " + fmt("%.3g", pal));
  v.require(half <= 1e-12, "Delta(p=0) = N/2 max rel error " + fmt("%.3g", half));
  v.require(mono == 0, "R monotone in (A, m), " + std::to_string(mono) + " violations");
  v.require(fd <= 1e-6, "gradient vs finite differences max/N " + fmt("%.3g", fd));
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "uniform optimum at p=1", 1, uniform_optimum},
      {2, "closed-form small-M anchors", 1, closed_form_anchors},
      {3, "gradient and grid-oracle validity", 30, gradient_and_oracle},
      {4, "DP equals exhaustive policy search", 60, dp_matches_exhaustive_search},
      {5, "dominance at zero feedback cost (unified)", 300, dominance_at_zero_cost},
      {6, "AoI reduction and eta=0.4 crossover (paper preset)", 600, fig3_claims},
      {7, "loss at p=0.9, eta=1 and monotone feedback Delta", 600, fig4_claims},
      {8, "winner map structure (paper preset)", 900, fig5_properties},
      {9, "Monte Carlo consistency", 300, monte_carlo_consistency},
      {10, "property suites", 60, property_suites},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = v.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s  %2d  %s: %s  [%.2fs, limit %gs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  return failed;
}
