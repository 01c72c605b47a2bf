#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aoifb/aoifb.hpp"

namespace aoifb::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kInvalidConfig = 2, kGuardRefusal = 3 };

/// Parsed `start:stop:step` (inclusive within 1e-12), a comma list, or a
/// single value. Values are snapped to 12 decimals.
inline std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw invalid_input("bad grid value '" + s + "' in '" + text + "'");
    }
    if (used != s.size() || !std::isfinite(v))
      throw invalid_input("bad grid value '" + s + "' in '" + text + "'");
    return v;
  };
  auto snap = [](double v) { return std::round(v * 1e12) / 1e12; };

  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
    if (parts.size() != 3) throw invalid_input("grid must be start:stop:step, got '" + text + "'");
    const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw invalid_input("grid needs step > 0 and start <= stop");
    if ((stop - start) / step > 1e6) throw invalid_input("grid too large");
    for (long k = 0;; ++k) {
      const double v = start + static_cast<double>(k) * step;
      if (v > stop + 1e-12) break;
      out.push_back(snap(v));
    }
  } else {
    std::stringstream ss(text);
    for (std::string s; std::getline(ss, s, ',');) out.push_back(number(s));
    for (std::size_t i = 1; i < out.size(); ++i)
      if (!(out[i] > out[i - 1])) throw invalid_input("grid values must be ascending");
  }
  if (out.empty()) throw invalid_input("empty grid '" + text + "'");
  return out;
}

struct RunConfig {
  std::string command;
  std::optional<int> n, m, mf;
  std::optional<double> p;
  double eta = 0.0;
  std::uint64_t seed = 1;
  std::int64_t reps = 100'000;
  std::string convention = "paper";
  std::string out;
  int jobs = 1;
  std::string preset;
  std::string p_grid, eta_grid;
  std::string schedule_file, policy_file;
  std::string strategy = "both";
  std::string mf_rule = "floor";
  bool round = false;
  std::optional<double> oracle_step;
  bool oracle = false;
};

namespace detail {

inline std::string fmt(double v) { return format_real(v); }

inline StageCost stage_cost(const RunConfig& c) {
  return c.convention == "paper" ? StageCost::PaperLiteral : StageCost::ContinuousArea;
}

inline ComparisonPreset comparison(const RunConfig& c) {
  return c.convention == "paper" ? ComparisonPreset::Paper : ComparisonPreset::Unified;
}

inline ResetConvention offline_reset(const RunConfig& c) {
  return c.convention == "paper" ? ResetConvention::Instant : ResetConvention::Delayed;
}

inline BudgetRounding rounding(const RunConfig& c) {
  return c.mf_rule == "floor" ? BudgetRounding::Floor : BudgetRounding::Round;
}

template <typename T>
T require(const std::optional<T>& v, const char* flag) {
  if (!v) throw invalid_input(std::string("missing required option ") + flag);
  return *v;
}

inline std::vector<double> p_values(const RunConfig& c) {
  if (!c.p_grid.empty()) return parse_grid(c.p_grid);
  return {require(c.p, "--p")};
}

inline std::vector<double> eta_values(const RunConfig& c) {
  if (!c.eta_grid.empty()) return parse_grid(c.eta_grid);
  return {c.eta};
}

inline std::vector<int> budgets(const RunConfig& c) {
  if (c.preset == "fig3" && !c.m) return {10, 20};
  return {require(c.m, "--m")};
}

inline IntervalSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open schedule file '" + path + "'");
  return parse_schedule_record(in);
}

inline PolicyTable load_policy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open policy file '" + path + "'");
  return read_policy(in);
}

inline std::vector<int> epochs_of(const IntervalSchedule& s) {
  std::vector<int> out;
  for (double tau : s.instants()) out.push_back(static_cast<int>(std::lround(tau)));
  return out;
}

}  // namespace detail

/// Text written to --out (or stdout) by a subcommand.
struct Output {
  std::string text;
  bool binary = false;
};

inline Output cmd_optimize(const RunConfig& c) {
  const ScenarioParams params(detail::require(c.n, "--n"), detail::require(c.m, "--m"),
                              detail::require(c.p, "--p"));
  const auto sol = solve_offline_schedule(params);
  auto j = solution_record(sol);
  if (c.round) {
    const auto r = round_schedule_to_epochs(params, sol.schedule);
    j["rounded_instants"] = intervals_to_instants(r);
    j["rounded_delta"] = expected_schedule_aoi(params, r);
  }
  if (c.oracle_step) {
    const auto o = brute_force_offline_oracle(params, *c.oracle_step);
    j["oracle"] = {{"instants", intervals_to_instants(o.schedule)}, {"delta", o.delta}};
  }
  return {j.dump() + "\n"};
}

/// Policy summary on stdout; the binary table goes to --out when given.
inline nlohmann::json policy_summary(const PolicyTable& t) {
  nlohmann::json j;
  j["n"] = t.horizon();
  j["m_f"] = t.opportunities();
  j["p"] = t.success_prob();
  j["convention"] = std::string(to_string(t.convention()));
  j["expected_total_age"] = expected_policy_cost(t);
  j["delta"] = expected_policy_delta(t);
  j["states"] = t.state_count();
  return j;
}

inline std::pair<nlohmann::json, PolicyTable> cmd_policy(const RunConfig& c) {
  const int n = detail::require(c.n, "--n");
  const double p = detail::require(c.p, "--p");
  int mf = 0;
  if (c.mf) {
    mf = *c.mf;
  } else {
    mf = effective_opportunities(detail::require(c.m, "--m or --mf"), c.eta, detail::rounding(c));
  }
  auto table = build_policy(n, mf, p, detail::stage_cost(c));
  auto j = policy_summary(table);
  if (c.oracle) j["oracle_total_age"] = enumerate_policies_oracle(n, mf, p, table.convention());
  return {j, std::move(table)};
}

inline CsvTable sweep_header() { return {{"p", "m", "strategy", "delta", "stderr"}, {}}; }
inline CsvTable region_header() {
  return {{"p", "eta", "m_f", "delta_nofeedback", "delta_feedback", "winner"}, {}};
}

inline void add_region_row(CsvTable& t, const RegionCell& c) {
  t.rows.push_back({detail::fmt(c.p), detail::fmt(c.eta), std::to_string(c.m_f),
                    detail::fmt(c.delta_nofeedback), detail::fmt(c.delta_feedback),
                    std::string(to_string(c.winner))});
}

inline CsvTable cmd_simulate(const RunConfig& c) {
  const bool want_nf = c.strategy != "feedback";
  const bool want_fb = c.strategy != "nofeedback";
  std::optional<IntervalSchedule> fixed;
  if (!c.schedule_file.empty()) fixed = detail::load_schedule(c.schedule_file);
  std::optional<PolicyTable> stored;
  if (!c.policy_file.empty()) stored = detail::load_policy(c.policy_file);

  int n = 0;
  if (c.n) n = *c.n;
  else if (fixed) n = static_cast<int>(std::lround(fixed->horizon()));
  else if (stored) n = stored->horizon();
  else throw invalid_input("missing required option --n");

  std::vector<int> ms;
  if (c.m) ms = {*c.m};
  else if (fixed) ms = {static_cast<int>(fixed->updates())};
  else if (stored) ms = {stored->opportunities()};
  else ms = detail::budgets(c);

  std::vector<double> ps;
  if (!c.p_grid.empty() || c.p) ps = detail::p_values(c);
  else if (stored) ps = {stored->success_prob()};
  else ps = detail::p_values(c);

  const auto etas = detail::eta_values(c);
  CsvTable table = sweep_header();
  for (int m : ms) {
    for (double p : ps) {
      const ScenarioParams params(n, m, p);
      if (want_nf) {
        IntervalSchedule sched = fixed ? *fixed : solve_offline_schedule(params).schedule;
        if (sched.updates() != static_cast<std::size_t>(m))
          throw invalid_input("schedule file has a different number of transmissions than --m");
        if (!sched.is_integral()) sched = round_schedule_to_epochs(params, sched);
        const auto s = simulate_schedule(params, detail::epochs_of(sched), c.seed, c.reps,
                                         detail::offline_reset(c), c.jobs);
        table.rows.push_back({detail::fmt(p), std::to_string(m), "nofeedback",
                              detail::fmt(s.mean), detail::fmt(s.std_error)});
      }
      if (want_fb) {
        std::vector<int> seen;
        for (double eta : etas) {
          const int mf = stored ? stored->opportunities()
                                : effective_opportunities(m, eta, detail::rounding(c));
          if (std::find(seen.begin(), seen.end(), mf) != seen.end()) continue;
          seen.push_back(mf);
          const PolicyTable policy = stored ? *stored : build_policy(n, mf, p, detail::stage_cost(c));
          if (policy.horizon() != n) throw invalid_input("policy file horizon does not match --n");
          const auto s = simulate_policy(params, policy, c.seed, c.reps, ResetConvention::Delayed,
                                         c.jobs);
          table.rows.push_back({detail::fmt(p), std::to_string(mf), "feedback",
                                detail::fmt(s.delta.mean), detail::fmt(s.delta.std_error)});
        }
      }
    }
  }
  return table;
}

inline CsvTable cmd_compare(const RunConfig& c) {
  const int n = detail::require(c.n, "--n");
  const auto preset = detail::comparison(c);
  const auto rule = detail::rounding(c);
  if (c.p_grid.empty()) {
    CsvTable t = region_header();
    const int m = detail::require(c.m, "--m");
    const auto scores = score_strategies(n, m, detail::require(c.p, "--p"), preset);
    for (double eta : detail::eta_values(c)) add_region_row(t, make_cell(scores, m, eta, rule));
    return t;
  }
  // Sweep over p: analytic scores, so stderr is zero.
  CsvTable t = sweep_header();
  const auto ps = detail::p_values(c);
  const auto etas = detail::eta_values(c);
  for (int m : detail::budgets(c)) {
    std::vector<StrategyScores> cache(ps.size());
    parallel_for(static_cast<std::int64_t>(ps.size()), c.jobs, [&](std::int64_t i) {
      cache[static_cast<std::size_t>(i)] = score_strategies(n, m, ps[i], preset);
    });
    for (const auto& s : cache) {
      t.rows.push_back({detail::fmt(s.p), std::to_string(m), "nofeedback",
                        detail::fmt(s.delta_nofeedback), detail::fmt(0.0)});
      std::vector<int> seen;
      for (double eta : etas) {
        const int mf = effective_opportunities(m, eta, rule);
        if (std::find(seen.begin(), seen.end(), mf) != seen.end()) continue;
        seen.push_back(mf);
        t.rows.push_back({detail::fmt(s.p), std::to_string(mf), "feedback",
                          detail::fmt(s.delta_feedback[mf]), detail::fmt(0.0)});
      }
    }
  }
  return t;
}

inline CsvTable cmd_region(const RunConfig& c) {
  const int n = detail::require(c.n, "--n");
  const int m = detail::require(c.m, "--m");
  if (c.p_grid.empty() || c.eta_grid.empty())
    throw invalid_input("region needs --p-grid and --eta-grid (or --preset)");
  const auto ps = parse_grid(c.p_grid);
  const auto etas = parse_grid(c.eta_grid);
  CsvTable t = region_header();
  for (const auto& cell :
       sweep_region(n, m, ps, etas, detail::comparison(c), detail::rounding(c), c.jobs))
    add_region_row(t, cell);
  return t;
}

/// Fills figure defaults for anything the user did not set.
inline void apply_preset(RunConfig& c) {
  if (c.preset.empty()) return;
  if (!c.n) c.n = 1000;
  if (c.preset != "fig3" && !c.m) c.m = 10;
  if (c.preset == "fig3") {
    if (c.p_grid.empty()) c.p_grid = "0.05:0.95:0.05";
    if (c.eta_grid.empty()) c.eta_grid = "0:0.4:0.4";
  } else if (c.preset == "fig4") {
    if (c.p_grid.empty()) c.p_grid = "0.7,0.9";
    if (c.eta_grid.empty()) c.eta_grid = "0:1:0.1";
  } else {
    if (c.p_grid.empty()) c.p_grid = "0.05:0.95:0.05";
    if (c.eta_grid.empty()) c.eta_grid = "0:1:0.1";
  }
}

inline std::vector<std::string> echo_lines(const RunConfig& c, const std::string& effective) {
  std::vector<std::string> lines{"aoifb " + c.command};
  std::stringstream ss(effective);
  for (std::string l; std::getline(ss, l);)
    if (!l.empty()) lines.push_back(l);
  return lines;
}

/// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Finite-horizon AoI scheduling with and without feedback", "aoifb"};
  app.set_config("--config", "", "Config file (TOML-style key = value); flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  app.add_option("--n", c.n, "Horizon N in epochs")->check(CLI::PositiveNumber);
  app.add_option("--m", c.m, "Transmission budget M without feedback")->check(CLI::PositiveNumber);
  app.add_option("--mf", c.mf, "Transmission budget M_f with feedback")->check(CLI::NonNegativeNumber);
  app.add_option("--p", c.p, "Per-attempt success probability")->check(CLI::Range(0.0, 1.0));
  app.add_option("--eta", c.eta, "Feedback cost coefficient")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", c.seed, "Monte Carlo seed");
  app.add_option("--reps", c.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  app.add_option("--convention", c.convention, "Objective convention preset")
      ->check(CLI::IsMember({"paper", "unified"}));
  app.add_option("--out", c.out, "Output file (default: standard output)");
  app.add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--preset", c.preset, "Figure preset")->check(CLI::IsMember({"fig3", "fig4", "fig5"}));
  app.add_option("--p-grid", c.p_grid, "p grid: start:stop:step or a,b,c");
  app.add_option("--eta-grid", c.eta_grid, "eta grid: start:stop:step or a,b,c");
  app.add_option("--schedule", c.schedule_file, "Schedule record to simulate");
  app.add_option("--policy", c.policy_file, "Binary policy table to simulate");
  app.add_option("--strategy", c.strategy, "Strategies to simulate")
      ->check(CLI::IsMember({"nofeedback", "feedback", "both"}));
  app.add_option("--mf-rule", c.mf_rule, "Integer budget rule for M/(1+eta)")
      ->check(CLI::IsMember({"floor", "round"}));
  app.add_flag("--round", c.round, "Also report the schedule rounded to epochs");
  app.add_option("--oracle-step", c.oracle_step, "Also run the brute-force oracle on this grid step")
      ->check(CLI::PositiveNumber);
  app.add_flag("--oracle", c.oracle, "Also run the exhaustive policy oracle");

  for (const char* name : {"optimize", "policy", "simulate", "compare", "region"})
    app.add_subcommand(name)->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "aoifb: " << e.what() << '\n';
    return kInvalidConfig;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    apply_preset(c);
    const auto comments = echo_lines(c, app.config_to_str(true, false));
    auto emit_text = [&](const std::string& text) {
      if (c.out.empty()) {
        out << text;
        return;
      }
      std::ofstream f(c.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open output file '" + c.out + "'");
      for (const auto& l : comments) f << "# " << l << '\n';
      f << text;
    };
    auto emit_csv = [&](const CsvTable& t) {
      std::ostringstream ss;
      write_csv(ss, t);
      emit_text(ss.str());
    };

    if (c.command == "optimize") {
      emit_text(cmd_optimize(c).text);
    } else if (c.command == "policy") {
      auto [summary, table] = cmd_policy(c);
      if (!c.out.empty()) {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file '" + c.out + "'");
        write_policy(f, table);
      }
      out << summary.dump() << '\n';
    } else if (c.command == "simulate") {
      emit_csv(cmd_simulate(c));
    } else if (c.command == "compare") {
      emit_csv(cmd_compare(c));
    } else {
      emit_csv(cmd_region(c));
    }
  } catch (const instance_too_large& e) {
    err << "aoifb: " << e.what() << '\n';
    return kGuardRefusal;
  } catch (const invalid_input& e) {
    err << "aoifb: invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::exception& e) {
    err << "aoifb: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}

}  // namespace aoifb::cli
