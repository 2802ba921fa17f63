#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "commsim/engine.hpp"
#include "commsim/model.hpp"

namespace commsim {

/// Malformed input text; line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- configuration ----
//
// Line-based text: one `key = value` per line, `#` starts a comment, keys are
// the SimParams field names. Unlisted keys keep their defaults. The two
// deadline keys also accept `inf`.

SimParams parse_config(std::string_view text);
SimParams load_config(const std::filesystem::path& path);
std::string write_config(const SimParams& params);

/// Names of every config key, in SimParams declaration order.
std::vector<std::string_view> config_keys();

// ---- single runs ----

inline constexpr std::string_view kSnapshotCsvHeader =
    "step,pc_total,pc_idle,ic_total,ic_idle,neutral_total,alarm_total,alarm_waiting,"
    "part_total,part_waiting,nonurg_total,nonurg_waiting,failures_cum,mean_wait";

/// Header plus one row per snapshot.
void write_snapshot_csv(std::ostream& out, const std::vector<Snapshot>& snapshots);

/// Summary block: "role # total; idle" lines, failures, latency.
std::string format_summary(const RunSummary& summary);

/// Runs `params` and writes the snapshot CSV to `csv_path`, followed by the
/// summary block as `#` comment lines.
RunResult run_single(const SimParams& params, const std::filesystem::path& csv_path);

// ---- sweeps ----

struct SweepSpec {
  std::string parameter = "p_d";  // only p_d is supported
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;

  /// Throws ValidationError when any coupled (a_d, p_d, r_d) is infeasible.
  void validate(const SimParams& base) const;
  /// Base params with p_d set, r_d = 1 - a_d - p_d, and the given seed.
  SimParams apply(const SimParams& base, double value, std::uint64_t seed) const;
};

struct SweepRow {
  double p_d = 0.0;
  std::uint64_t seed = 0;
  std::int64_t failures_total = 0;
  double ave_latency = 0.0;
  RunSummary summary;
};

struct SweepAggregate {
  double p_d = 0.0;
  std::size_t runs = 0;
  double failures_mean = 0.0;
  double failures_sd = 0.0;
  double latency_mean = 0.0;
  double latency_sd = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by p_d, then seed
  std::vector<SweepAggregate> aggregate;
};

/// Runs every (value, seed) pair on up to `threads` workers (0 = hardware
/// concurrency). Output does not depend on scheduling.
SweepResult run_sweep(const SimParams& base, const SweepSpec& spec, unsigned threads = 0);

/// Per-p_d mean and sample standard deviation (0 for a single run).
std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows);

inline constexpr std::string_view kSweepCsvHeader =
    "p_d,seed,failures_total,ave_latency,pc_total,pc_idle,ic_total,ic_idle,neutral_total,"
    "alarm_total,alarm_waiting,part_total,part_waiting,nonurg_total,nonurg_waiting";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_aggregate_table(std::ostream& out, const std::vector<SweepAggregate>& aggregate);

struct PlotPoint {
  double p_d = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct PlotTables {
  std::vector<PlotPoint> failures;
  std::vector<PlotPoint> latency;
};

/// Throws std::invalid_argument on empty input.
PlotTables emit_plot_data(const std::vector<SweepRow>& rows);

/// Tab-separated "p_d<TAB>mean<TAB>stddev" with a header line.
void write_plot_table(std::ostream& out, const std::vector<PlotPoint>& points);

// ---- small parsers shared with the CLI ----

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// "0.1,0.15,0.6"
std::vector<double> parse_double_list(std::string_view text);
/// "1,2,5-9" (ranges inclusive)
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace commsim
