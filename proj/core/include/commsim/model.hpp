#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace commsim {

using Step = std::int64_t;

/// Deadline offset meaning "never expires".
inline constexpr Step kNever = std::numeric_limits<Step>::max();

/// Saturating `from + offset`, so kNever offsets stay kNever.
constexpr Step add_steps(Step from, Step offset) noexcept {
  return offset >= kNever - from ? kNever : from + offset;
}

// ---- errors ----

/// Raised when parameters break one or more invariants. Carries one message
/// per violated invariant.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Internal state that should be unreachable (a bug, not a domain case).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// ---- identifiers ----

struct CellId {
  int row = 0;
  int col = 0;

  // Member order gives row-major ordering.
  friend auto operator<=>(const CellId&, const CellId&) = default;
};

/// Chebyshev (king-move) distance on the bounded grid.
int chebyshev(CellId a, CellId b) noexcept;

std::string to_string(CellId id);

enum class ActivityId : std::uint32_t {};

// ---- roles ----

enum class RequestClass : std::uint8_t { Alarm, Participant, NonUrgent };

std::string_view to_string(RequestClass c) noexcept;

struct RequestKind {
  RequestClass cls = RequestClass::NonUrgent;
  /// Only meaningful for Participant requests.
  std::uint16_t activity_type = 0;

  static constexpr RequestKind alarm() noexcept { return {RequestClass::Alarm, 0}; }
  static constexpr RequestKind participant(std::uint16_t type) noexcept {
    return {RequestClass::Participant, type};
  }
  static constexpr RequestKind non_urgent() noexcept { return {RequestClass::NonUrgent, 0}; }

  /// Lower rank is served first: Alarm < Participant < NonUrgent.
  constexpr int priority_rank() const noexcept { return static_cast<int>(cls); }

  friend bool operator==(const RequestKind&, const RequestKind&) = default;
};

enum class RoleKind : std::uint8_t { ProfessionalCarer, InformalCarer, Neutral, Requester };

struct Role {
  RoleKind kind = RoleKind::Neutral;
  RequestKind request{};  // valid when kind == Requester

  static constexpr Role professional() noexcept { return {RoleKind::ProfessionalCarer, {}}; }
  static constexpr Role informal() noexcept { return {RoleKind::InformalCarer, {}}; }
  static constexpr Role neutral() noexcept { return {RoleKind::Neutral, {}}; }
  static constexpr Role requester(RequestKind k) noexcept { return {RoleKind::Requester, k}; }

  bool is_carer() const noexcept {
    return kind == RoleKind::ProfessionalCarer || kind == RoleKind::InformalCarer;
  }

  friend bool operator==(const Role& a, const Role& b) noexcept {
    return a.kind == b.kind && (a.kind != RoleKind::Requester || a.request == b.request);
  }
};

/// The six census buckets: carers, neutrals and one bucket per request class.
enum class CensusRole : std::uint8_t { PC, IC, Neutral, Alarm, Participant, NonUrgent };
inline constexpr std::size_t kCensusRoles = 6;

CensusRole census_role(const Role& role) noexcept;
std::string_view to_string(CensusRole r) noexcept;
std::string to_string(const Role& role);

// ---- engagement ----

struct Idle {
  friend bool operator==(const Idle&, const Idle&) = default;
};
struct Serving {
  CellId target;
  Step remaining = 0;
  friend bool operator==(const Serving&, const Serving&) = default;
};
struct BeingServed {
  CellId carer;
  Step remaining = 0;
  friend bool operator==(const BeingServed&, const BeingServed&) = default;
};
struct Participating {
  ActivityId activity{};
  friend bool operator==(const Participating&, const Participating&) = default;
};
struct Waiting {
  Step since = 0;
  friend bool operator==(const Waiting&, const Waiting&) = default;
};

using Engagement = std::variant<Idle, Serving, BeingServed, Participating, Waiting>;

/// Serving, BeingServed and Participating cells are "actively interacting".
bool is_interacting(const Engagement& e) noexcept;

struct Cell {
  CellId id;
  Role role;
  Engagement engagement = Idle{};
};

// ---- grid ----

class Grid {
 public:
  /// width x height cells, all Neutral and Idle.
  Grid(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return cells_.size(); }

  bool contains(CellId id) const noexcept {
    return id.row >= 0 && id.row < height_ && id.col >= 0 && id.col < width_;
  }
  std::size_t index_of(CellId id) const noexcept {
    return static_cast<std::size_t>(id.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(id.col);
  }
  CellId id_at(std::size_t index) const noexcept {
    return {static_cast<int>(index / static_cast<std::size_t>(width_)),
            static_cast<int>(index % static_cast<std::size_t>(width_))};
  }

  Cell& at(CellId id);
  const Cell& at(CellId id) const;
  Cell& operator[](std::size_t index) noexcept { return cells_[index]; }
  const Cell& operator[](std::size_t index) const noexcept { return cells_[index]; }

  std::span<Cell> cells() noexcept { return cells_; }
  std::span<const Cell> cells() const noexcept { return cells_; }

 private:
  int width_;
  int height_;
  std::vector<Cell> cells_;
};

// ---- parameters ----

struct SimParams {
  // initial role mix
  double pc_rate = 0.1;
  double ic_rate = 0.25;
  double r_rate = 0.25;
  double n_rate = 0.4;
  // initial requester-kind mix
  double a_rate = 0.15;
  double p_rate = 0.35;
  double nr_rate = 0.5;
  // churn outcomes; a re-rolled cell becomes a requester w.p. 1 - ic_d - n_d
  double ic_d = 0.05;
  double n_d = 0.05;
  // churn requester-kind mix
  double a_d = 0.15;
  double p_d = 0.15;
  double r_d = 0.7;

  std::int64_t churn_count = 5;
  Step steps = 10000;
  Step record_every = 10;
  int grid_w = 25;
  int grid_h = 25;
  std::uint64_t seed = 1;

  Step service_duration = 10;
  Step activity_duration = 20;
  std::int64_t activity_min_size = 2;
  std::int64_t activity_capacity = 6;
  std::int64_t activity_types = 1;
  Step participant_wait_window = 20;
  Step deadline_alarm = 5;       // kNever disables expiry
  Step deadline_nonurgent = 50;  // also bounds participant requests
  double pref_informal = 0.5;

  double requester_d() const noexcept { return 1.0 - ic_d - n_d; }

  /// One message per violated invariant; empty when valid.
  std::vector<std::string> violations() const;
  /// Throws ValidationError listing every violation.
  void validate() const;

  friend bool operator==(const SimParams&, const SimParams&) = default;
};

inline constexpr double kRateTolerance = 1e-9;

// ---- requests and activities ----

enum class RequestState : std::uint8_t { WaitingMatch, InForming, Active, Completed, Aborted };

struct Request {
  CellId owner;
  RequestKind kind;
  Step created = 0;
  Step deadline = 0;
  RequestState state = RequestState::WaitingMatch;
  std::optional<ActivityId> forming;  // set while InForming
  /// Drawn once at creation; decides between informal and professional care.
  bool prefers_informal = false;
  /// A participant request whose wait window lapsed is matched as non-urgent.
  bool fell_through = false;

  bool is_pending() const noexcept {
    return state == RequestState::WaitingMatch || state == RequestState::InForming;
  }
};

/// At most one live request per cell, indexed like the grid.
class RequestBook {
 public:
  explicit RequestBook(std::size_t cells = 0) : slots_(cells) {}

  std::optional<Request>& slot(std::size_t index) { return slots_[index]; }
  const std::optional<Request>& slot(std::size_t index) const { return slots_[index]; }
  std::size_t size() const noexcept { return slots_.size(); }

  std::span<std::optional<Request>> slots() noexcept { return slots_; }
  std::span<const std::optional<Request>> slots() const noexcept { return slots_; }

 private:
  std::vector<std::optional<Request>> slots_;
};

enum class ActivityState : std::uint8_t { Forming, Ongoing, Finished };

struct Activity {
  ActivityId id{};
  std::uint16_t activity_type = 0;
  std::vector<CellId> members;  // join order
  ActivityState state = ActivityState::Forming;
  Step remaining = 0;  // valid while Ongoing
  Step created = 0;

  bool has_member(CellId c) const noexcept;
};

/// Live activities ordered by id, which is also creation order.
class ActivitySet {
 public:
  Activity& create(std::uint16_t type, Step now);
  Activity* find(ActivityId id) noexcept;
  const Activity* find(ActivityId id) const noexcept;
  /// Drops every Finished activity.
  void sweep_finished();

  std::span<Activity> all() noexcept { return items_; }
  std::span<const Activity> all() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }

 private:
  std::vector<Activity> items_;
  std::uint32_t next_id_ = 0;
};

/// Everything one run mutates, apart from its RNG.
struct Community {
  Grid grid;
  ActivitySet activities;
  RequestBook requests;
  std::int64_t failures = 0;
  /// Finished services and activities, cumulative.
  std::int64_t completions = 0;

  explicit Community(Grid g) : grid(std::move(g)), requests(grid.size()) {}

  std::optional<Request>& request_of(CellId id) { return requests.slot(grid.index_of(id)); }
  const std::optional<Request>& request_of(CellId id) const {
    return requests.slot(grid.index_of(id));
  }
};

// ---- census ----

struct RoleCount {
  std::int64_t total = 0;
  /// Idle for carers, waiting for requesters, equal to total for neutrals.
  std::int64_t idle = 0;
  friend bool operator==(const RoleCount&, const RoleCount&) = default;
};

struct RoleCensus {
  std::array<RoleCount, kCensusRoles> counts{};

  RoleCount& operator[](CensusRole r) noexcept { return counts[static_cast<std::size_t>(r)]; }
  const RoleCount& operator[](CensusRole r) const noexcept {
    return counts[static_cast<std::size_t>(r)];
  }
  std::int64_t total() const noexcept;
  friend bool operator==(const RoleCensus&, const RoleCensus&) = default;
};

struct Snapshot {
  Step step = 0;
  RoleCensus census;
  std::int64_t failures_cum = 0;
  double mean_wait = 0.0;
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// Component-wise mean of a run's snapshots; failures are cumulative, not averaged.
struct RunSummary {
  std::array<double, kCensusRoles> avg_total{};
  std::array<double, kCensusRoles> avg_idle{};
  std::int64_t failures_total = 0;
  double ave_latency = 0.0;
  std::size_t snapshot_count = 0;

  double total(CensusRole r) const noexcept { return avg_total[static_cast<std::size_t>(r)]; }
  double idle(CensusRole r) const noexcept { return avg_idle[static_cast<std::size_t>(r)]; }
};

RunSummary summarize(std::span<const Snapshot> snapshots);

// ---- operations ----

/// Validates params and builds an all-Neutral, all-Idle grid.
Grid new_grid(const SimParams& params);

RoleCensus role_census(const Grid& grid);

}  // namespace commsim
