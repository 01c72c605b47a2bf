#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "aoifb/aoi.hpp"
#include "aoifb/types.hpp"

namespace aoifb {

/// First-order optimality conditions of the expected-AoI objective with
/// y_M = N - sum(y_0..y_{M-1}) eliminated: matrix * y = rhs over the M
/// free intervals. Coefficients are in area units (the 1/N factor dropped).
struct GradientSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

enum class SolveMethod { Linear, Fallback };

inline std::string_view to_string(SolveMethod m) {
  return m == SolveMethod::Linear ? "linear" : "fallback";
}

struct OfflineOptions {
  bool force_fallback = false;
  double condition_limit = 1e12;
  int max_fallback_iterations = 1'000'000;
};

struct OfflineSolution {
  IntervalSchedule schedule;
  double delta;
  SolveMethod method;
  double gradient_norm;
};

struct OracleResult {
  IntervalSchedule schedule;
  double delta;
};

namespace detail {

inline std::vector<double> powers(double q, int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  out[0] = 1.0;
  for (int k = 1; k <= n; ++k) out[k] = out[k - 1] * q;
  return out;
}

inline IntervalSchedule uniform_schedule(int horizon, int updates) {
  std::vector<double> instants(static_cast<std::size_t>(updates));
  for (int i = 0; i < updates; ++i)
    instants[i] = static_cast<double>(horizon) * (i + 1) / (updates + 1);
  return IntervalSchedule::from_instants(std::move(instants), horizon);
}

}  // namespace detail

/// Gradient of the area N*Delta with respect to every interval (no
/// elimination): g_i = sum_j (1-p)^|i-j| y_j, evaluated in O(M).
inline std::vector<double> area_gradient(std::span<const double> y, double success_prob) {
  const double q = 1.0 - success_prob;
  const std::size_t n = y.size();
  std::vector<double> g(y.begin(), y.end());
  double left = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] += left;
    left = q * (left + y[i]);
  }
  double right = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    g[i] += right;
    right = q * (right + y[i]);
  }
  return g;
}

/// Partial derivatives of Delta in the free coordinates y_0..y_{M-1}.
inline std::vector<double> reduced_gradient(std::span<const double> y, double horizon,
                                            double success_prob) {
  const auto g = area_gradient(y, success_prob);
  std::vector<double> out(y.size() - 1);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) out[i] = (g[i] - g.back()) / horizon;
  return out;
}

/// Euclidean projection of v onto {x >= 0, sum x = total}.
inline std::vector<double> project_onto_simplex(std::span<const double> v, double total) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - total) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = std::max(v[i] - theta, 0.0);
  return x;
}

/// Norm of (y - P(y - step*grad Delta)) / step, P the simplex projection.
/// Zero exactly at the constrained minimizer; equals the tangential
/// gradient norm at interior points.
inline double gradient_mapping_norm(std::span<const double> y, double horizon,
                                    double success_prob, double step = 1.0) {
  const auto g = area_gradient(y, success_prob);
  std::vector<double> trial(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) trial[i] = y[i] - step * g[i] / horizon;
  const auto proj = project_onto_simplex(trial, horizon);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = (y[i] - proj[i]) / step;
    s += d * d;
  }
  return std::sqrt(s);
}

inline GradientSystem assemble_gradient_system(const ScenarioParams& params) {
  const double p = params.success_prob();
  if (!(p > 0.0 && p < 1.0))
    throw invalid_input("gradient system is only assembled for 0 < p < 1");
  const int m = params.max_updates();
  const double n = params.horizon();
  const auto qp = detail::powers(1.0 - p, m);

  GradientSystem sys{Eigen::MatrixXd(m, m), Eigen::VectorXd(m)};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j)
      sys.matrix(i, j) = qp[std::abs(i - j)] - qp[m - i] - qp[m - j] + 1.0;
    sys.rhs(i) = (1.0 - qp[m - i]) * n;
  }
  return sys;
}

/// Projected (accelerated, restarted) gradient descent on the simplex
/// {y >= 0, sum y = N} from the uniform start. Stops once the gradient
/// mapping norm falls to 1e-9.
inline std::vector<double> minimize_on_simplex(const ScenarioParams& params,
                                               int max_iterations = 1'000'000) {
  const int m = params.max_updates();
  const double n = params.horizon();
  const double p = params.success_prob();
  const double q = 1.0 - p;
  const auto qp = detail::powers(q, m);

  double row_max = 0.0;
  for (int i = 0; i <= m; ++i) {
    double row = 0.0;
    for (int j = 0; j <= m; ++j) row += qp[std::abs(i - j)];
    row_max = std::max(row_max, row);
  }
  const double step = n / row_max;  // 1/L with L = lambda_max(W)/N bounded by row sums
  const double tol = 1e-9;

  auto area = [&](std::span<const double> y) {
    return expected_schedule_aoi(y, n, p);
  };

  std::vector<double> x(static_cast<std::size_t>(m) + 1, n / (m + 1));
  std::vector<double> z = x;
  std::vector<double> trial(x.size());
  double t = 1.0;
  double fx = area(x);
  for (int it = 0; it < max_iterations; ++it) {
    if (gradient_mapping_norm(x, n, p, step) <= tol) break;
    const auto g = area_gradient(z, p);
    for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] - step * g[i] / n;
    auto next = project_onto_simplex(trial, n);
    const double fnext = area(next);
    if (fnext > fx) {
      z = x;
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i < z.size(); ++i)
      z[i] = next[i] + ((t - 1.0) / t_next) * (next[i] - x[i]);
    x = std::move(next);
    fx = fnext;
    t = t_next;
  }
  return x;
}

namespace detail {

inline IntervalSchedule close_intervals(std::vector<double> y, double horizon) {
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    y[i] = std::max(y[i], 0.0);
    head += y[i];
  }
  y.back() = std::max(horizon - head, 0.0);
  return IntervalSchedule::from_intervals(std::move(y), horizon);
}

}  // namespace detail

/// Delta-minimizing stateless schedule.
///
/// p = 1 and p = 0 return the uniform schedule directly (at p = 0 every
/// schedule has Delta = N/2). Otherwise the gradient system is solved by
/// LU with partial pivoting; an ill-conditioned system or a solution with
/// some y_i < -1e-9 switches to the simplex-constrained minimizer.
inline OfflineSolution solve_offline_schedule(const ScenarioParams& params,
                                              const OfflineOptions& options = {}) {
  const int n = params.horizon();
  const int m = params.max_updates();
  const double p = params.success_prob();

  auto finish = [&](IntervalSchedule sched, SolveMethod method) {
    const double delta = expected_schedule_aoi(sched.intervals(), n, p);
    const double gnorm = gradient_mapping_norm(sched.intervals(), n, p);
    return OfflineSolution{std::move(sched), delta, method, gnorm};
  };

  if (p == 1.0 || p == 0.0) return finish(detail::uniform_schedule(n, m), SolveMethod::Linear);

  if (!options.force_fallback) {
    const auto sys = assemble_gradient_system(params);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
    if (lu.rcond() * options.condition_limit >= 1.0) {
      const Eigen::VectorXd head = lu.solve(sys.rhs);
      std::vector<double> y(head.data(), head.data() + head.size());
      const double rest = n - std::accumulate(y.begin(), y.end(), 0.0);
      y.push_back(rest);
      if (*std::min_element(y.begin(), y.end()) >= -1e-9)
        return finish(detail::close_intervals(std::move(y), n), SolveMethod::Linear);
    }
  }
  auto y = minimize_on_simplex(params, options.max_fallback_iterations);
  return finish(detail::close_intervals(std::move(y), n), SolveMethod::Fallback);
}

/// Snaps a schedule onto distinct integer epochs in [0, N-1].
///
/// Starts from nearest rounding, pushes colliding instants forward (and
/// compacts against the end of the horizon if needed), then does a
/// coordinate local search over each instant's floor/ceil candidates,
/// accepting any strict improvement of Delta.
inline IntervalSchedule round_schedule_to_epochs(const ScenarioParams& params,
                                                 const IntervalSchedule& sched) {
  const int n = params.horizon();
  const auto src = sched.instants();
  const int m = static_cast<int>(src.size());
  if (m > n) throw invalid_input("cannot place more transmissions than epochs");
  if (m == 0) return IntervalSchedule::from_instants({}, n);
  const double p = params.success_prob();
  const long last = n - 1;

  std::vector<long> lo(m), hi(m), v(m);
  for (int i = 0; i < m; ++i) {
    lo[i] = std::clamp(static_cast<long>(std::floor(src[i])), 0L, last);
    hi[i] = std::clamp(static_cast<long>(std::ceil(src[i])), 0L, last);
    v[i] = std::clamp(std::lround(src[i]), 0L, last);
  }
  for (int i = 1; i < m; ++i)
    if (v[i] <= v[i - 1]) v[i] = v[i - 1] + 1;
  for (int i = m - 1; i >= 0; --i)
    v[i] = std::min(v[i], i == m - 1 ? last : v[i + 1] - 1);

  auto delta_of = [&](const std::vector<long>& inst) {
    std::vector<double> y(inst.size() + 1);
    double prev = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
      y[i] = static_cast<double>(inst[i]) - prev;
      prev = static_cast<double>(inst[i]);
    }
    y.back() = n - prev;
    return expected_schedule_aoi(y, n, p);
  };

  double best = delta_of(v);
  for (bool improved = true; improved;) {
    improved = false;
    for (int i = 0; i < m; ++i) {
      for (long alt : {lo[i], hi[i]}) {
        if (alt == v[i]) continue;
        if (i > 0 && alt <= v[i - 1]) continue;
        if (i + 1 < m && alt >= v[i + 1]) continue;
        const long keep = v[i];
        v[i] = alt;
        const double d = delta_of(v);
        if (d < best) {
          best = d;
          improved = true;
        } else {
          v[i] = keep;
        }
      }
    }
  }
  return IntervalSchedule::from_instants({v.begin(), v.end()}, n);
}

/// Exhaustive minimization of Delta over all placements of M distinct
/// instants on the grid {0, step, 2*step, ...} below N. Refuses instances
/// with more than 1e7 placements.
inline OracleResult brute_force_offline_oracle(const ScenarioParams& params, double grid_step) {
  if (!(grid_step > 0.0)) throw invalid_input("grid_step must be > 0");
  const int n = params.horizon();
  const int m = params.max_updates();
  const double p = params.success_prob();
  const auto k = static_cast<long>(std::floor(n / grid_step + 1e-9));
  if (k < m) throw invalid_input("grid has fewer points than transmissions");

  double count = 1.0;
  for (int i = 0; i < m; ++i) count = count * static_cast<double>(k - i) / (i + 1);
  if (count > 1e7)
    throw instance_too_large("brute-force oracle refused: " + std::to_string(count) +
                             " placements exceed 1e7");

  std::vector<long> idx(m);
  std::iota(idx.begin(), idx.end(), 0L);
  std::vector<double> y(static_cast<std::size_t>(m) + 1);
  std::vector<long> best_idx = idx;
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    double prev = 0.0;
    for (int i = 0; i < m; ++i) {
      const double tau = idx[i] * grid_step;
      y[i] = tau - prev;
      prev = tau;
    }
    y[m] = n - prev;
    const double d = expected_schedule_aoi(y, n, p);
    if (d < best) {
      best = d;
      best_idx = idx;
    }
    int i = m - 1;
    while (i >= 0 && idx[i] == k - m + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  std::vector<double> instants(m);
  for (int i = 0; i < m; ++i) instants[i] = best_idx[i] * grid_step;
  return {IntervalSchedule::from_instants(std::move(instants), n), best};
}

}  // namespace aoifb
