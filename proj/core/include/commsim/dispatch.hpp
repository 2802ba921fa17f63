#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "commsim/model.hpp"
#include "commsim/rng.hpp"

namespace commsim {

// ---- outcomes ----

struct ServedByPC {
  CellId carer;
  friend bool operator==(const ServedByPC&, const ServedByPC&) = default;
};
struct ServedByIC {
  CellId carer;
  friend bool operator==(const ServedByIC&, const ServedByIC&) = default;
};
struct JoinedActivity {
  ActivityId activity{};
  friend bool operator==(const JoinedActivity&, const JoinedActivity&) = default;
};
struct InitiatedActivity {
  ActivityId activity{};
  friend bool operator==(const InitiatedActivity&, const InitiatedActivity&) = default;
};
struct StillWaiting {
  friend bool operator==(const StillWaiting&, const StillWaiting&) = default;
};
struct Aborted {
  friend bool operator==(const Aborted&, const Aborted&) = default;
};

using DispatchOutcome =
    std::variant<ServedByPC, ServedByIC, JoinedActivity, InitiatedActivity, StillWaiting, Aborted>;

std::string to_string(const DispatchOutcome& outcome);

/// Predicates evaluated while parsing a request, in evaluation order.
enum class Probe {
  IsAlarm,             // step 1
  IsParticipant,       // step 2
  AlreadyForming,      // request already sits in a forming activity
  FindActivity,        // step 2.1
  InitiateActivity,    // step 2.2
  TreatAsNonUrgent,    // step 3
  ReadPreference,      // step 4
  FindInformalCarer,   // step 5
  FindProfessional,    // step 6
};

using DispatchTrace = std::vector<Probe>;

// ---- ordering ----

/// Alarm before Participant before NonUrgent; older first within a class;
/// remaining ties by owner in row-major order. Stable.
std::vector<Request> priority_order(std::vector<Request> pending);

/// Strict weak ordering used by priority_order.
bool dispatched_before(const Request& a, const Request& b) noexcept;

// ---- matching ----

/// Idle IC nearest to `requester` by Chebyshev distance; ties are broken
/// uniformly at random. No draw is made when the nearest IC is unique.
std::optional<CellId> select_informal_carer(CellId requester, const Grid& grid, RngStream& rng);

/// Any idle PC, uniformly. No draw is made for a single candidate.
std::optional<CellId> select_professional_carer(const Grid& grid, RngStream& rng);

enum class TimeConstraint { KeepWaiting, FallThroughToNonUrgent };

/// A forming participant request falls through once its wait window has elapsed.
TimeConstraint check_time_constraint(const Request& req, Step now, const SimParams& params);

/// Joins the oldest non-full activity of the requested type, or starts a new
/// forming one. A forming activity that reaches activity_min_size starts.
DispatchOutcome join_or_initiate(Community& community, Request& req, const SimParams& params,
                                 Step now);

/// Runs one request through the parse flow and applies the outcome to the
/// community. `req` must be the request stored in `community` for its owner.
DispatchOutcome parse_request(Community& community, Request& req, const SimParams& params,
                              RngStream& rng, Step now, DispatchTrace* trace = nullptr);

// ---- lifecycle helpers shared with the engine ----

/// Pairs carer and requester for service_duration steps; completes at once
/// when the duration is zero.
void start_service(Community& community, CellId carer, Request& req, Step duration);

/// Ends the pair led by `carer`: carer goes Idle, requester goes Neutral.
void complete_service(Community& community, CellId carer);

/// Starts a forming activity: members become Participating, requests Active.
void start_activity(Community& community, Activity& activity, Step duration);

/// Ends an ongoing activity: members go Neutral, their requests complete.
void finish_activity(Community& community, Activity& activity);

/// Removes the owner from its forming activity; marks the activity Finished
/// when it becomes empty. No-op for requests that are not forming.
void leave_forming(Community& community, Request& req);

/// Owner becomes Neutral/Idle and its request slot is cleared.
void retire_requester(Community& community, CellId owner);

/// Falls through a forming participant request to non-urgent matching.
void fall_through(Community& community, Request& req);

}  // namespace commsim
