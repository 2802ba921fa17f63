#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "commsim/engine.hpp"

namespace commsim::testing {

/// Random but valid parameters: role and churn mixes from normalised uniform
/// draws, small grids, short durations and deadlines.
inline SimParams random_params(std::uint64_t seed) {
  RngStream r(seed ^ 0x9e3779b97f4a7c15ull);
  auto mix = [&r](std::size_t n) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& x : w) sum += (x = r.uniform01() + 0.05);
    for (double& x : w) x /= sum;
    // Fold rounding into the last entry so the sum is within tolerance.
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) head += w[i];
    w[n - 1] = 1.0 - head;
    return w;
  };
  SimParams p;
  p.seed = seed;
  p.grid_w = 3 + static_cast<int>(r.index(10));
  p.grid_h = 3 + static_cast<int>(r.index(10));
  const auto roles = mix(4);
  p.pc_rate = roles[0];
  p.ic_rate = roles[1];
  p.r_rate = roles[2];
  p.n_rate = roles[3];
  const auto kinds = mix(3);
  p.a_rate = kinds[0];
  p.p_rate = kinds[1];
  p.nr_rate = kinds[2];
  const auto churn = mix(3);
  p.a_d = churn[0];
  p.p_d = churn[1];
  p.r_d = churn[2];
  p.ic_d = 0.2 * r.uniform01();
  p.n_d = 0.2 * r.uniform01();
  p.churn_count = static_cast<int>(r.index(8));
  p.service_duration = static_cast<Step>(r.index(16));
  p.activity_duration = static_cast<Step>(r.index(30));
  p.activity_min_size = 1 + static_cast<int>(r.index(4));
  p.activity_capacity = p.activity_min_size + static_cast<int>(r.index(5));
  p.activity_types = 1 + static_cast<int>(r.index(3));
  p.participant_wait_window = static_cast<Step>(r.index(40));
  p.deadline_alarm = 1 + static_cast<Step>(r.index(10));
  p.deadline_nonurgent = 1 + static_cast<Step>(r.index(80));
  p.pref_informal = r.uniform01();
  return p;
}

/// Steps a simulation and checks every invariant after each step. Returns the
/// first few violations (empty when the run is clean).
inline std::vector<std::string> check_run(const SimParams& params, Step steps) {
  std::vector<std::string> problems;
  auto note = [&problems](Step t, const std::string& what) {
    if (problems.size() < 10) problems.push_back("step " + std::to_string(t) + ": " + what);
  };
  Simulation sim(params);
  const auto cells = static_cast<std::int64_t>(sim.community().grid.size());
  const auto pcs = role_census(sim.community().grid)[CensusRole::PC].total;
  std::int64_t failures = 0;
  for (Step t = 1; t <= steps && problems.size() < 10; ++t) {
    const auto report = sim.advance();
    const auto& c = sim.community();
    for (const auto& v : check_invariants(c, params)) note(t, v);
    const auto census = role_census(c.grid);
    if (census.total() != cells) note(t, "cell count changed");
    if (census[CensusRole::PC].total != pcs) note(t, "PC count changed");
    if (!report.alarms_left_waiting.empty() && census[CensusRole::PC].idle != 0) {
      note(t, "alarm left waiting while a PC is idle");
    }
    if (c.failures < failures) note(t, "failures decreased");
    failures = c.failures;
  }
  if (params.deadline_alarm == kNever && params.deadline_nonurgent == kNever && failures != 0) {
    note(steps, "failures with infinite deadlines");
  }
  return problems;
}

}  // namespace commsim::testing
