// Acceptance checks: prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "commsim/harness.hpp"
#include "hand_traces.hpp"
#include "property_checks.hpp"

namespace {

using namespace commsim;
namespace fs = std::filesystem;

int failed = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failed;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string list(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
  return out + "]";
}

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] < xs[i - 1])) return false;
  }
  return true;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string sweep_bytes(const SimParams& base, const SweepSpec& spec, unsigned threads) {
  const auto result = run_sweep(base, spec, threads);
  std::ostringstream out;
  write_sweep_csv(out, result.rows);
  write_aggregate_table(out, result.aggregate);
  return out.str();
}

}  // namespace

int main() {
  const SimParams base = load_config(COMMSIM_DEFAULT_CONFIG);

  // Criteria 1-3 share one sweep: p_d in {0.10, 0.15, 0.25, 0.60}, 20 seeds.
  SweepSpec spec;
  spec.values = {0.10, 0.15, 0.25, 0.60};
  spec.seeds = parse_seed_list("1-20");
  const auto sweep = run_sweep(base, spec);
  std::vector<double> f, l;
  for (const auto& a : sweep.aggregate) {
    f.push_back(a.failures_mean);
    l.push_back(a.latency_mean);
  }

  {
    const double ratio = f[1] / std::max(f[3], 1e-12);
    const bool ok = strictly_decreasing(f) && strictly_decreasing(l) && ratio >= 10.0;
    report(1, "trend reproduction", ok,
           "failures " + list(f) + " latency " + list(l) + " F(0.15)/F(0.60) " + fmt(ratio));
  }
  {
    const double ratio = l[0] / std::max(l[2], 1e-12);
    report(2, "instability at p_d=0.10", ratio >= 10.0,
           "L(0.10) " + fmt(l[0]) + " / L(0.25) " + fmt(l[2]) + " = " + fmt(ratio) +
               " (need >= 10)");
  }
  {
    const bool ok = f[1] >= 30 && f[1] <= 3000 && l[1] >= 2 && l[1] <= 250;
    report(3, "calibration target", ok,
           "at p_d=0.15 failures " + fmt(f[1]) + " in [30,3000], latency " + fmt(l[1]) +
               " in [2,250]");
  }
  {
    SimParams p = base;
    p.steps = 10000;
    p.record_every = 10;
    const auto result = run(p);
    bool cumulative = true;
    for (std::size_t i = 1; i < result.snapshots.size(); ++i) {
      cumulative &= result.snapshots[i].failures_cum >= result.snapshots[i - 1].failures_cum;
    }
    const bool ok = result.snapshots.size() == 1000 && cumulative &&
                    result.summary.failures_total == result.snapshots.back().failures_cum;
    report(4, "run protocol", ok,
           std::to_string(result.snapshots.size()) + " snapshots, failures_total " +
               std::to_string(result.summary.failures_total) + " = last failures_cum " +
               std::to_string(result.snapshots.back().failures_cum));
  }
  {
    std::vector<std::string> problems;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      for (bool infinite : {false, true}) {
        auto p = testing::random_params(seed);
        if (infinite) p.deadline_alarm = p.deadline_nonurgent = kNever;
        for (auto& v : testing::check_run(p, 10000)) {
          problems.push_back("seed " + std::to_string(seed) + " " + v);
        }
      }
    }
    report(5, "property suite", problems.empty(),
           problems.empty() ? "10 seeds x 10000 steps, finite and infinite deadlines"
                            : problems.front());
  }
  {
    SimParams p = base;
    p.steps = 3000;
    const auto a = fs::temp_directory_path() / "commsim_accept_a.csv";
    const auto b = fs::temp_directory_path() / "commsim_accept_b.csv";
    run_single(p, a);
    run_single(p, b);
    const bool csv_same = slurp(a) == slurp(b);
    fs::remove(a);
    fs::remove(b);
    SimParams small = base;
    small.steps = 2000;
    SweepSpec s2;
    s2.values = {0.15, 0.6};
    s2.seeds = {1, 2, 3, 4};
    const auto serial = sweep_bytes(small, s2, 1);
    const bool sweep_same = serial == sweep_bytes(small, s2, 4);
    report(6, "determinism", csv_same && sweep_same,
           std::string("snapshot CSV ") + (csv_same ? "identical" : "differs") +
               ", sweep 1 vs 4 threads " + (sweep_same ? "identical" : "differs"));
  }
  {
    auto s1 = testing::hand_trace_scenario(true);
    auto s2 = testing::hand_trace_scenario(false);
    const bool a = testing::event_log(s1.community(), s1.params(), 20) == testing::kBothServedLog;
    const bool b = testing::event_log(s2.community(), s2.params(), 20) == testing::kAlarmAbortsLog;
    report(7, "hand-trace oracle", a && b,
           std::string("both served ") + (a ? "matches" : "differs") + ", alarm abort " +
               (b ? "matches" : "differs"));
  }
  {
    const auto s = run(base).summary;
    const double alarm = s.idle(CensusRole::Alarm);
    const double nonurg = s.idle(CensusRole::NonUrgent);
    const double ic = s.idle(CensusRole::IC);
    report(8, "census sanity", alarm < nonurg && ic > 0,
           "alarm_waiting " + fmt(alarm) + " < nonurg_waiting " + fmt(nonurg) + ", ic_idle " +
               fmt(ic) + " > 0");
  }
  return failed == 0 ? 0 : 1;
}
