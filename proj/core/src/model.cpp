#include "commsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace commsim {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string out = "invalid parameters:";
  for (const auto& s : v) {
    out += "\n  - ";
    out += s;
  }
  return out;
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void check_mix(std::vector<std::string>& out, std::string_view label,
               std::initializer_list<std::pair<std::string_view, double>> parts) {
  double sum = 0.0;
  std::string names;
  for (const auto& [name, value] : parts) {
    if (!is_probability(value)) {
      out.push_back(std::string(name) + " must lie in [0, 1] (got " + std::to_string(value) + ")");
    }
    sum += value;
    if (!names.empty()) names += " + ";
    names += name;
  }
  if (std::abs(sum - 1.0) > kRateTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << label << ": " << names << " must sum to 1 (got " << sum << ")";
    out.push_back(msg.str());
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

int chebyshev(CellId a, CellId b) noexcept {
  return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

std::string to_string(CellId id) {
  return "(" + std::to_string(id.row) + "," + std::to_string(id.col) + ")";
}

std::string_view to_string(RequestClass c) noexcept {
  switch (c) {
    case RequestClass::Alarm: return "alarm";
    case RequestClass::Participant: return "participant";
    case RequestClass::NonUrgent: return "non-urgent";
  }
  return "?";
}

CensusRole census_role(const Role& role) noexcept {
  switch (role.kind) {
    case RoleKind::ProfessionalCarer: return CensusRole::PC;
    case RoleKind::InformalCarer: return CensusRole::IC;
    case RoleKind::Neutral: return CensusRole::Neutral;
    case RoleKind::Requester: break;
  }
  switch (role.request.cls) {
    case RequestClass::Alarm: return CensusRole::Alarm;
    case RequestClass::Participant: return CensusRole::Participant;
    case RequestClass::NonUrgent: break;
  }
  return CensusRole::NonUrgent;
}

std::string_view to_string(CensusRole r) noexcept {
  switch (r) {
    case CensusRole::PC: return "PC";
    case CensusRole::IC: return "IC";
    case CensusRole::Neutral: return "Ne";
    case CensusRole::Alarm: return "A";
    case CensusRole::Participant: return "P";
    case CensusRole::NonUrgent: return "R";
  }
  return "?";
}

std::string to_string(const Role& role) {
  switch (role.kind) {
    case RoleKind::ProfessionalCarer: return "PC";
    case RoleKind::InformalCarer: return "IC";
    case RoleKind::Neutral: return "Neutral";
    case RoleKind::Requester: break;
  }
  std::string out = "Requester(" + std::string(to_string(role.request.cls));
  if (role.request.cls == RequestClass::Participant) {
    out += ":" + std::to_string(role.request.activity_type);
  }
  return out + ")";
}

bool is_interacting(const Engagement& e) noexcept {
  return std::holds_alternative<Serving>(e) || std::holds_alternative<BeingServed>(e) ||
         std::holds_alternative<Participating>(e);
}

Grid::Grid(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw ValidationError({"grid_w and grid_h must be >= 1 (got " + std::to_string(width) +
                           " x " + std::to_string(height) + ")"});
  }
  cells_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i].id = id_at(i);
}

Cell& Grid::at(CellId id) {
  if (!contains(id)) throw std::out_of_range("cell " + to_string(id) + " outside grid");
  return cells_[index_of(id)];
}

const Cell& Grid::at(CellId id) const {
  if (!contains(id)) throw std::out_of_range("cell " + to_string(id) + " outside grid");
  return cells_[index_of(id)];
}

std::vector<std::string> SimParams::violations() const {
  std::vector<std::string> out;
  check_mix(out, "initial role mix",
            {{"pc_rate", pc_rate}, {"ic_rate", ic_rate}, {"r_rate", r_rate}, {"n_rate", n_rate}});
  check_mix(out, "initial requester mix",
            {{"a_rate", a_rate}, {"p_rate", p_rate}, {"nr_rate", nr_rate}});
  check_mix(out, "churn requester mix", {{"a_d", a_d}, {"p_d", p_d}, {"r_d", r_d}});
  if (!is_probability(ic_d)) out.push_back("ic_d must lie in [0, 1]");
  if (!is_probability(n_d)) out.push_back("n_d must lie in [0, 1]");
  if (ic_d + n_d > 1.0 + kRateTolerance) out.push_back("churn outcomes: ic_d + n_d must be <= 1");
  if (!is_probability(pref_informal)) out.push_back("pref_informal must lie in [0, 1]");

  auto non_negative = [&](std::string_view name, std::int64_t v) {
    if (v < 0) out.push_back(std::string(name) + " must be >= 0 (got " + std::to_string(v) + ")");
  };
  non_negative("churn_count", churn_count);
  non_negative("steps", steps);
  non_negative("service_duration", service_duration);
  non_negative("activity_duration", activity_duration);
  non_negative("participant_wait_window", participant_wait_window);
  non_negative("deadline_alarm", deadline_alarm);
  non_negative("deadline_nonurgent", deadline_nonurgent);

  if (grid_w < 1) out.push_back("grid_w must be >= 1 (got " + std::to_string(grid_w) + ")");
  if (grid_h < 1) out.push_back("grid_h must be >= 1 (got " + std::to_string(grid_h) + ")");
  if (record_every < 1) out.push_back("record_every must be >= 1");
  if (activity_min_size < 1) out.push_back("activity_min_size must be >= 1");
  if (activity_capacity < activity_min_size) {
    out.push_back("activity_capacity must be >= activity_min_size");
  }
  if (activity_types < 1 || activity_types > 65536) {
    out.push_back("activity_types must lie in [1, 65536]");
  }
  return out;
}

void SimParams::validate() const {
  auto v = violations();
  if (!v.empty()) throw ValidationError(std::move(v));
}

bool Activity::has_member(CellId c) const noexcept {
  return std::find(members.begin(), members.end(), c) != members.end();
}

Activity& ActivitySet::create(std::uint16_t type, Step now) {
  Activity a;
  a.id = ActivityId{next_id_++};
  a.activity_type = type;
  a.created = now;
  items_.push_back(std::move(a));
  return items_.back();
}

Activity* ActivitySet::find(ActivityId id) noexcept {
  auto it = std::lower_bound(items_.begin(), items_.end(), id,
                             [](const Activity& a, ActivityId key) { return a.id < key; });
  return it != items_.end() && it->id == id ? &*it : nullptr;
}

const Activity* ActivitySet::find(ActivityId id) const noexcept {
  return const_cast<ActivitySet*>(this)->find(id);
}

void ActivitySet::sweep_finished() {
  std::erase_if(items_, [](const Activity& a) { return a.state == ActivityState::Finished; });
}

std::int64_t RoleCensus::total() const noexcept {
  std::int64_t sum = 0;
  for (const auto& c : counts) sum += c.total;
  return sum;
}

RunSummary summarize(std::span<const Snapshot> snapshots) {
  RunSummary s;
  s.snapshot_count = snapshots.size();
  if (snapshots.empty()) return s;
  double latency = 0.0;
  for (const auto& snap : snapshots) {
    for (std::size_t r = 0; r < kCensusRoles; ++r) {
      s.avg_total[r] += static_cast<double>(snap.census.counts[r].total);
      s.avg_idle[r] += static_cast<double>(snap.census.counts[r].idle);
    }
    latency += snap.mean_wait;
  }
  const auto n = static_cast<double>(snapshots.size());
  for (std::size_t r = 0; r < kCensusRoles; ++r) {
    s.avg_total[r] /= n;
    s.avg_idle[r] /= n;
  }
  s.ave_latency = latency / n;
  s.failures_total = snapshots.back().failures_cum;
  return s;
}

Grid new_grid(const SimParams& params) {
  params.validate();
  return Grid(params.grid_w, params.grid_h);
}

RoleCensus role_census(const Grid& grid) {
  RoleCensus census;
  for (const Cell& cell : grid.cells()) {
    auto& slot = census[census_role(cell.role)];
    ++slot.total;
    switch (cell.role.kind) {
      case RoleKind::Neutral:
        ++slot.idle;
        break;
      case RoleKind::Requester:
        if (std::holds_alternative<Waiting>(cell.engagement)) ++slot.idle;
        break;
      default:
        if (std::holds_alternative<Idle>(cell.engagement)) ++slot.idle;
        break;
    }
  }
  return census;
}

}  // namespace commsim
