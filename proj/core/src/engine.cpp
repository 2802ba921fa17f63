#include "commsim/engine.hpp"

#include <algorithm>
#include <array>

namespace commsim {

namespace {

RequestKind draw_kind(RngStream& rng, double alarm, double participant, double non_urgent,
                      std::int64_t activity_types) {
  const std::array<double, 3> weights{alarm, participant, non_urgent};
  switch (rng.categorical(weights)) {
    case 0: return RequestKind::alarm();
    case 1: {
      std::uint16_t type = 0;
      if (activity_types > 1) {
        type = static_cast<std::uint16_t>(rng.index(static_cast<std::size_t>(activity_types)));
      }
      return RequestKind::participant(type);
    }
    default: return RequestKind::non_urgent();
  }
}

void become_requester(Community& community, Cell& cell, RequestKind kind, Step now,
                      const SimParams& params, RngStream& rng) {
  cell.role = Role::requester(kind);
  cell.engagement = Waiting{now};
  community.request_of(cell.id) = make_request(cell.id, kind, now, params, rng);
}

// Drops a pending request without counting a failure.
void cancel_request(Community& community, CellId owner) {
  auto& slot = community.request_of(owner);
  if (!slot) return;
  leave_forming(community, *slot);
  slot.reset();
}

}  // namespace

Request make_request(CellId owner, RequestKind kind, Step now, const SimParams& params,
                     RngStream& rng) {
  Request req;
  req.owner = owner;
  req.kind = kind;
  req.created = now;
  req.deadline = add_steps(
      now, kind.cls == RequestClass::Alarm ? params.deadline_alarm : params.deadline_nonurgent);
  req.state = RequestState::WaitingMatch;
  req.prefers_informal = rng.bernoulli(params.pref_informal);
  return req;
}

Community init_grid(const SimParams& params, RngStream& rng) {
  Community community(new_grid(params));
  // Draw order per cell: role, then (requesters only) kind, type, preference.
  const std::array<double, 4> role_weights{params.pc_rate, params.ic_rate, params.n_rate,
                                           params.r_rate};
  for (Cell& cell : community.grid.cells()) {
    switch (rng.categorical(role_weights)) {
      case 0: cell.role = Role::professional(); break;
      case 1: cell.role = Role::informal(); break;
      case 2: cell.role = Role::neutral(); break;
      default: {
        const auto kind =
            draw_kind(rng, params.a_rate, params.p_rate, params.nr_rate, params.activity_types);
        become_requester(community, cell, kind, 0, params, rng);
        continue;
      }
    }
    cell.engagement = Idle{};
  }
  return community;
}

std::vector<RoleChange> churn_step(Community& community, const SimParams& params,
                                   RngStream& rng, Step now) {
  std::vector<std::size_t> eligible;
  auto cells = community.grid.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].role.kind != RoleKind::ProfessionalCarer && !is_interacting(cells[i].engagement)) {
      eligible.push_back(i);
    }
  }
  const std::size_t picks =
      std::min(eligible.size(), static_cast<std::size_t>(std::max<std::int64_t>(0, params.churn_count)));

  // Partial Fisher-Yates: the first `picks` slots become the sample.
  for (std::size_t i = 0; i < picks; ++i) {
    std::swap(eligible[i], eligible[i + rng.index(eligible.size() - i)]);
  }

  const std::array<double, 3> outcome_weights{params.ic_d, params.n_d,
                                              std::max(0.0, params.requester_d())};
  std::vector<RoleChange> changes;
  changes.reserve(picks);
  for (std::size_t i = 0; i < picks; ++i) {
    Cell& cell = cells[eligible[i]];
    const Role before = cell.role;
    cancel_request(community, cell.id);
    switch (rng.categorical(outcome_weights)) {
      case 0:
        cell.role = Role::informal();
        cell.engagement = Idle{};
        break;
      case 1:
        cell.role = Role::neutral();
        cell.engagement = Idle{};
        break;
      default:
        become_requester(community, cell,
                         draw_kind(rng, params.a_d, params.p_d, params.r_d, params.activity_types),
                         now, params, rng);
        break;
    }
    changes.push_back({cell.id, before, cell.role});
  }
  community.activities.sweep_finished();
  return changes;
}

std::int64_t advance_interactions(Community& community, Step /*now*/) {
  const std::int64_t before = community.completions;
  for (Cell& cell : community.grid.cells()) {
    auto* serving = std::get_if<Serving>(&cell.engagement);
    if (!serving) continue;
    if (serving->remaining <= 1) {
      complete_service(community, cell.id);
      continue;
    }
    --serving->remaining;
    auto& served = std::get<BeingServed>(community.grid.at(serving->target).engagement);
    --served.remaining;
  }
  for (Activity& activity : community.activities.all()) {
    if (activity.state != ActivityState::Ongoing) continue;
    if (activity.remaining <= 1) {
      finish_activity(community, activity);
    } else {
      --activity.remaining;
    }
  }
  community.activities.sweep_finished();
  return community.completions - before;
}

std::vector<CellId> expire_deadlines(Community& community, Step now) {
  std::vector<CellId> aborted;
  for (auto& slot : community.requests.slots()) {
    if (!slot || !slot->is_pending() || now < slot->deadline) continue;
    const CellId owner = slot->owner;
    leave_forming(community, *slot);
    slot->state = RequestState::Aborted;
    ++community.failures;
    retire_requester(community, owner);
    aborted.push_back(owner);
  }
  community.activities.sweep_finished();
  return aborted;
}

std::vector<CellId> apply_time_constraints(Community& community, const SimParams& params,
                                           Step now) {
  std::vector<CellId> moved;
  for (auto& slot : community.requests.slots()) {
    if (!slot || slot->state != RequestState::InForming) continue;
    if (check_time_constraint(*slot, now, params) == TimeConstraint::FallThroughToNonUrgent) {
      fall_through(community, *slot);
      moved.push_back(slot->owner);
    }
  }
  community.activities.sweep_finished();
  return moved;
}

std::vector<Request> pending_requests(const Community& community) {
  std::vector<Request> pending;
  for (const auto& slot : community.requests.slots()) {
    if (slot && slot->is_pending()) pending.push_back(*slot);
  }
  return priority_order(std::move(pending));
}

StepReport step(Community& community, const SimParams& params, RngStream& rng, Step now) {
  StepReport report;
  report.step = now;
  const std::int64_t completions_before = community.completions;

  report.churned = churn_step(community, params, rng, now);
  advance_interactions(community, now);
  report.aborted = expire_deadlines(community, now);
  report.fell_through = apply_time_constraints(community, params, now);

  const auto pending = pending_requests(community);
  for (const Request& snapshot : pending) {
    // Earlier outcomes in this loop may already have moved this request on.
    auto& slot = community.request_of(snapshot.owner);
    if (!slot || !slot->is_pending()) continue;
    report.dispatched.emplace_back(snapshot.owner,
                                   parse_request(community, *slot, params, rng, now));
  }
  community.activities.sweep_finished();

  for (const Request& req : pending) {
    if (req.kind.cls != RequestClass::Alarm) continue;
    const auto& slot = community.request_of(req.owner);
    if (slot && slot->is_pending()) report.alarms_left_waiting.push_back(req.owner);
  }
  // Waiting times derive from Request::created, so ageing needs no per-cell update.
  report.completed_interactions = community.completions - completions_before;
  return report;
}

double latency_metric(const Community& community, Step now) {
  double total = 0.0;
  std::int64_t waiting = 0;
  for (const auto& slot : community.requests.slots()) {
    if (!slot || !slot->is_pending()) continue;
    total += static_cast<double>(now - slot->created);
    ++waiting;
  }
  return waiting == 0 ? 0.0 : total / static_cast<double>(waiting);
}

Snapshot take_snapshot(const Community& community, Step now) {
  return {now, role_census(community.grid), community.failures, latency_metric(community, now)};
}

std::vector<std::string> check_invariants(const Community& community, const SimParams& params) {
  std::vector<std::string> errors;
  const Grid& grid = community.grid;
  auto fail = [&](CellId id, const std::string& what) {
    errors.push_back(to_string(id) + ": " + what);
  };

  if (role_census(grid).total() != static_cast<std::int64_t>(grid.size())) {
    errors.push_back("census does not sum to the cell count");
  }

  for (const Cell& cell : grid.cells()) {
    const auto& req = community.request_of(cell.id);
    const bool requester = cell.role.kind == RoleKind::Requester;
    if (requester != req.has_value()) fail(cell.id, "request slot does not match role");
    if (req && (req->owner != cell.id || req->deadline < req->created)) {
      fail(cell.id, "malformed request");
    }

    std::visit(
        [&](const auto& e) {
          using E = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<E, Idle>) {
            if (requester) fail(cell.id, "idle requester");
          } else if constexpr (std::is_same_v<E, Serving>) {
            if (!cell.role.is_carer()) fail(cell.id, "non-carer serving");
            const auto* other = grid.contains(e.target)
                                    ? std::get_if<BeingServed>(&grid.at(e.target).engagement)
                                    : nullptr;
            if (!other || other->carer != cell.id || other->remaining != e.remaining) {
              fail(cell.id, "serving link not mirrored");
            }
          } else if constexpr (std::is_same_v<E, BeingServed>) {
            if (!requester) fail(cell.id, "non-requester being served");
            const auto* other = grid.contains(e.carer)
                                    ? std::get_if<Serving>(&grid.at(e.carer).engagement)
                                    : nullptr;
            if (!other || other->target != cell.id || other->remaining != e.remaining) {
              fail(cell.id, "served link not mirrored");
            }
            if (req && req->state != RequestState::Active) fail(cell.id, "served but not active");
          } else if constexpr (std::is_same_v<E, Participating>) {
            if (!requester) fail(cell.id, "non-requester participating");
            const Activity* a = community.activities.find(e.activity);
            if (!a || a->state != ActivityState::Ongoing || !a->has_member(cell.id)) {
              fail(cell.id, "participating outside an ongoing activity");
            }
            if (req && req->state != RequestState::Active) {
              fail(cell.id, "participating but not active");
            }
          } else {
            if (!requester) fail(cell.id, "non-requester waiting");
            if (req && !req->is_pending()) fail(cell.id, "waiting without a pending request");
            if (req && req->state == RequestState::InForming) {
              const Activity* a = req->forming ? community.activities.find(*req->forming) : nullptr;
              if (!a || a->state != ActivityState::Forming || !a->has_member(cell.id)) {
                fail(cell.id, "forming request outside its activity");
              }
            }
          }
        },
        cell.engagement);
  }

  const auto min_size = static_cast<std::size_t>(params.activity_min_size);
  const auto capacity = static_cast<std::size_t>(params.activity_capacity);
  for (const Activity& a : community.activities.all()) {
    const std::string tag = "activity " + std::to_string(static_cast<std::uint32_t>(a.id));
    const auto n = a.members.size();
    switch (a.state) {
      case ActivityState::Forming:
        if (n < 1 || n >= min_size) errors.push_back(tag + ": forming size out of range");
        for (CellId m : a.members) {
          const auto& req = community.request_of(m);
          if (!req || req->state != RequestState::InForming || req->forming != a.id) {
            errors.push_back(tag + ": member " + to_string(m) + " not forming here");
          }
        }
        break;
      case ActivityState::Ongoing:
        if (n < min_size || n > capacity) errors.push_back(tag + ": ongoing size out of range");
        for (CellId m : a.members) {
          const auto* p = std::get_if<Participating>(&grid.at(m).engagement);
          if (!p || p->activity != a.id) {
            errors.push_back(tag + ": member " + to_string(m) + " not participating here");
          }
        }
        break;
      case ActivityState::Finished:
        errors.push_back(tag + ": finished activity still listed");
        break;
    }
  }
  return errors;
}

Simulation::Simulation(SimParams params)
    : params_((params.validate(), std::move(params))),
      rng_(params_.seed),
      community_(init_grid(params_, rng_)) {}

StepReport Simulation::advance() {
  ++now_;
  return step(community_, params_, rng_, now_);
}

RunResult run(const SimParams& params) {
  Simulation sim(params);
  RunResult result;
  result.snapshots.reserve(static_cast<std::size_t>(params.steps / params.record_every));
  for (Step s = 1; s <= params.steps; ++s) {
    sim.advance();
    if (s % params.record_every == 0) result.snapshots.push_back(take_snapshot(sim.community(), s));
  }
  result.summary = summarize(result.snapshots);
  return result;
}

}  // namespace commsim
