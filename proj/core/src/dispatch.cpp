#include "commsim/dispatch.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace commsim {

namespace {

void probe(DispatchTrace* trace, Probe p) {
  if (trace) trace->push_back(p);
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

DispatchOutcome professional_path(Community& community, Request& req, const SimParams& params,
                                  RngStream& rng, DispatchTrace* trace) {
  probe(trace, Probe::FindProfessional);
  if (auto pc = select_professional_carer(community.grid, rng)) {
    start_service(community, *pc, req, params.service_duration);
    return ServedByPC{*pc};
  }
  return StillWaiting{};
}

DispatchOutcome join_or_initiate_traced(Community& community, Request& req,
                                        const SimParams& params, Step now, DispatchTrace* trace) {
  if (req.kind.cls != RequestClass::Participant) {
    throw ConsistencyError("join_or_initiate on a non-participant request");
  }
  const auto type = req.kind.activity_type;
  const auto capacity = static_cast<std::size_t>(params.activity_capacity);
  const auto min_size = static_cast<std::size_t>(params.activity_min_size);
  Cell& owner = community.grid.at(req.owner);

  probe(trace, Probe::FindActivity);
  for (Activity& activity : community.activities.all()) {
    if (activity.activity_type != type || activity.state == ActivityState::Finished ||
        activity.members.size() >= capacity) {
      continue;
    }
    activity.members.push_back(req.owner);
    const ActivityId id = activity.id;
    if (activity.state == ActivityState::Ongoing) {
      owner.engagement = Participating{id};
      req.state = RequestState::Active;
      req.forming.reset();
    } else {
      req.state = RequestState::InForming;
      req.forming = id;
      if (activity.members.size() >= min_size) {
        start_activity(community, activity, params.activity_duration);
      }
    }
    return JoinedActivity{id};
  }

  probe(trace, Probe::InitiateActivity);
  Activity& fresh = community.activities.create(type, now);
  fresh.members.push_back(req.owner);
  req.state = RequestState::InForming;
  req.forming = fresh.id;
  const ActivityId id = fresh.id;
  if (fresh.members.size() >= min_size) {
    start_activity(community, fresh, params.activity_duration);
  }
  return InitiatedActivity{id};
}

}  // namespace

std::string to_string(const DispatchOutcome& outcome) {
  return std::visit(
      Overloaded{
          [](const ServedByPC& o) { return "ServedByPC" + to_string(o.carer); },
          [](const ServedByIC& o) { return "ServedByIC" + to_string(o.carer); },
          [](const JoinedActivity& o) {
            return "JoinedActivity(" + std::to_string(static_cast<std::uint32_t>(o.activity)) + ")";
          },
          [](const InitiatedActivity& o) {
            return "InitiatedActivity(" +
                   std::to_string(static_cast<std::uint32_t>(o.activity)) + ")";
          },
          [](const StillWaiting&) { return std::string("StillWaiting"); },
          [](const Aborted&) { return std::string("Aborted"); },
      },
      outcome);
}

bool dispatched_before(const Request& a, const Request& b) noexcept {
  return std::tuple(a.kind.priority_rank(), a.created, a.owner) <
         std::tuple(b.kind.priority_rank(), b.created, b.owner);
}

std::vector<Request> priority_order(std::vector<Request> pending) {
  std::stable_sort(pending.begin(), pending.end(), dispatched_before);
  return pending;
}

std::optional<CellId> select_informal_carer(CellId requester, const Grid& grid, RngStream& rng) {
  int best = std::numeric_limits<int>::max();
  std::vector<CellId> nearest;
  for (const Cell& cell : grid.cells()) {
    if (cell.role.kind != RoleKind::InformalCarer ||
        !std::holds_alternative<Idle>(cell.engagement)) {
      continue;
    }
    const int d = chebyshev(requester, cell.id);
    if (d < best) {
      best = d;
      nearest.clear();
    }
    if (d == best) nearest.push_back(cell.id);
  }
  if (nearest.empty()) return std::nullopt;
  if (nearest.size() == 1) return nearest.front();
  return nearest[rng.index(nearest.size())];
}

std::optional<CellId> select_professional_carer(const Grid& grid, RngStream& rng) {
  std::vector<CellId> idle;
  for (const Cell& cell : grid.cells()) {
    if (cell.role.kind == RoleKind::ProfessionalCarer &&
        std::holds_alternative<Idle>(cell.engagement)) {
      idle.push_back(cell.id);
    }
  }
  if (idle.empty()) return std::nullopt;
  if (idle.size() == 1) return idle.front();
  return idle[rng.index(idle.size())];
}

TimeConstraint check_time_constraint(const Request& req, Step now, const SimParams& params) {
  return now - req.created >= params.participant_wait_window
             ? TimeConstraint::FallThroughToNonUrgent
             : TimeConstraint::KeepWaiting;
}

DispatchOutcome join_or_initiate(Community& community, Request& req, const SimParams& params,
                                 Step now) {
  return join_or_initiate_traced(community, req, params, now, nullptr);
}

DispatchOutcome parse_request(Community& community, Request& req, const SimParams& params,
                              RngStream& rng, Step now, DispatchTrace* trace) {
  const Cell& owner = community.grid.at(req.owner);
  if (owner.role.kind != RoleKind::Requester) {
    throw ConsistencyError("parse_request: owner " + to_string(req.owner) + " is " +
                           to_string(owner.role) + ", not a requester");
  }
  if (!req.is_pending()) {
    throw ConsistencyError("parse_request: request of " + to_string(req.owner) +
                           " is not pending");
  }

  probe(trace, Probe::IsAlarm);
  if (req.kind.cls == RequestClass::Alarm) {
    return professional_path(community, req, params, rng, trace);
  }

  probe(trace, Probe::IsParticipant);
  if (req.kind.cls == RequestClass::Participant && !req.fell_through) {
    if (req.state == RequestState::InForming) {
      probe(trace, Probe::AlreadyForming);
      return StillWaiting{};
    }
    return join_or_initiate_traced(community, req, params, now, trace);
  }

  probe(trace, Probe::TreatAsNonUrgent);
  probe(trace, Probe::ReadPreference);
  if (req.prefers_informal) {
    probe(trace, Probe::FindInformalCarer);
    if (auto ic = select_informal_carer(req.owner, community.grid, rng)) {
      start_service(community, *ic, req, params.service_duration);
      return ServedByIC{*ic};
    }
  }
  return professional_path(community, req, params, rng, trace);
}

void start_service(Community& community, CellId carer, Request& req, Step duration) {
  Cell& c = community.grid.at(carer);
  Cell& owner = community.grid.at(req.owner);
  c.engagement = Serving{req.owner, duration};
  owner.engagement = BeingServed{carer, duration};
  req.state = RequestState::Active;
  req.forming.reset();
  if (duration == 0) complete_service(community, carer);
}

void complete_service(Community& community, CellId carer) {
  Cell& c = community.grid.at(carer);
  const auto* serving = std::get_if<Serving>(&c.engagement);
  if (!serving) throw ConsistencyError("complete_service: " + to_string(carer) + " not serving");
  const CellId target = serving->target;
  c.engagement = Idle{};
  retire_requester(community, target);
  ++community.completions;
}

void start_activity(Community& community, Activity& activity, Step duration) {
  activity.state = ActivityState::Ongoing;
  activity.remaining = duration;
  for (CellId member : activity.members) {
    community.grid.at(member).engagement = Participating{activity.id};
    if (auto& slot = community.request_of(member)) {
      slot->state = RequestState::Active;
      slot->forming.reset();
    }
  }
  if (duration == 0) finish_activity(community, activity);
}

void finish_activity(Community& community, Activity& activity) {
  for (CellId member : activity.members) retire_requester(community, member);
  activity.state = ActivityState::Finished;
  ++community.completions;
}

void leave_forming(Community& community, Request& req) {
  if (req.state != RequestState::InForming || !req.forming) return;
  if (Activity* activity = community.activities.find(*req.forming)) {
    std::erase(activity->members, req.owner);
    if (activity->members.empty()) activity->state = ActivityState::Finished;
  }
  req.forming.reset();
  req.state = RequestState::WaitingMatch;
}

void retire_requester(Community& community, CellId owner) {
  Cell& cell = community.grid.at(owner);
  cell.role = Role::neutral();
  cell.engagement = Idle{};
  community.request_of(owner).reset();
}

void fall_through(Community& community, Request& req) {
  leave_forming(community, req);
  req.fell_through = true;
}

}  // namespace commsim
