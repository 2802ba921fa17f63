#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "commsim/dispatch.hpp"
#include "commsim/model.hpp"
#include "commsim/rng.hpp"

namespace commsim {

struct RoleChange {
  CellId cell;
  Role before;
  Role after;
};

struct StepReport {
  Step step = 0;
  std::vector<RoleChange> churned;
  std::vector<std::pair<CellId, DispatchOutcome>> dispatched;
  std::vector<CellId> aborted;
  std::vector<CellId> fell_through;
  std::int64_t completed_interactions = 0;
  /// Alarm owners from this step's pending list still waiting after dispatch.
  std::vector<CellId> alarms_left_waiting;
};

/// Creates a fresh request for a cell that just became a requester.
Request make_request(CellId owner, RequestKind kind, Step now, const SimParams& params,
                     RngStream& rng);

/// Rolls every cell's role independently from the initial mixes.
Community init_grid(const SimParams& params, RngStream& rng);

/// Re-rolls up to churn_count eligible cells (non-PC, not interacting).
std::vector<RoleChange> churn_step(Community& community, const SimParams& params,
                                   RngStream& rng, Step now);

/// Counts down services and ongoing activities; returns how many ended.
std::int64_t advance_interactions(Community& community, Step now);

/// Aborts pending requests whose deadline has been reached.
std::vector<CellId> expire_deadlines(Community& community, Step now);

/// Falls through every forming participant request whose wait window lapsed.
std::vector<CellId> apply_time_constraints(Community& community, const SimParams& params,
                                           Step now);

/// Pending requests in dispatch order.
std::vector<Request> pending_requests(const Community& community);

StepReport step(Community& community, const SimParams& params, RngStream& rng, Step now);

/// Mean current wait of requesters that are still unmatched (0 if none).
double latency_metric(const Community& community, Step now);

Snapshot take_snapshot(const Community& community, Step now);

/// Full-scan consistency check: link symmetry, activity membership, request
/// bookkeeping and census conservation. Empty when consistent.
std::vector<std::string> check_invariants(const Community& community, const SimParams& params);

/// One seeded run. Owns its community and RNG.
class Simulation {
 public:
  explicit Simulation(SimParams params);

  /// Advances one step (now + 1).
  StepReport advance();

  Step now() const noexcept { return now_; }
  const SimParams& params() const noexcept { return params_; }
  const Community& community() const noexcept { return community_; }
  RngStream& rng() noexcept { return rng_; }

 private:
  SimParams params_;
  RngStream rng_;
  Community community_;
  Step now_ = 0;
};

struct RunResult {
  RunSummary summary;
  std::vector<Snapshot> snapshots;
};

/// init_grid followed by params.steps steps, snapshotting every record_every.
RunResult run(const SimParams& params);

}  // namespace commsim
