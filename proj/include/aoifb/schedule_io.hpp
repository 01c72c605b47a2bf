#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "aoifb/offline.hpp"
#include "aoifb/types.hpp"

namespace aoifb {

/// {"n": N, "instants": [tau_1, ..., tau_M]}
inline nlohmann::json schedule_record(const IntervalSchedule& sched) {
  nlohmann::json j;
  const double n = sched.horizon();
  if (n == std::round(n))
    j["n"] = static_cast<std::int64_t>(n);
  else
    j["n"] = n;
  j["instants"] = intervals_to_instants(sched);
  return j;
}

/// The schedule record plus solver metadata.
inline nlohmann::json solution_record(const OfflineSolution& sol) {
  auto j = schedule_record(sol.schedule);
  j["delta"] = sol.delta;
  j["method"] = std::string(to_string(sol.method));
  j["gradient_norm"] = sol.gradient_norm;
  return j;
}

/// Reads a schedule record; leading `#` comment lines are ignored and
/// extra metadata keys are tolerated.
inline IntervalSchedule parse_schedule_record(std::istream& is) {
  std::string body, raw;
  while (std::getline(is, raw)) {
    if (!raw.empty() && raw.front() == '#') continue;
    body += raw;
    body += '\n';
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("malformed schedule record: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("instants") || !j["n"].is_number() ||
      !j["instants"].is_array())
    throw invalid_input("schedule record needs numeric \"n\" and array \"instants\"");
  std::vector<double> instants;
  for (const auto& v : j["instants"]) {
    if (!v.is_number()) throw invalid_input("schedule instants must be numbers");
    instants.push_back(v.get<double>());
  }
  return IntervalSchedule::from_instants(std::move(instants), j["n"].get<double>());
}

}  // namespace aoifb
