#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "commsim/harness.hpp"

namespace commsim {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("commsim_test_" + name);
}

// ---- config ----

TEST(Config, EmptyTextGivesDefaults) { EXPECT_EQ(parse_config(""), SimParams{}); }

TEST(Config, ReadsKeysCommentsAndBlankLines) {
  const auto p = parse_config(
      "# comment\n"
      "\n"
      "grid_w = 15\n"
      "  grid_h=15   # trailing\n"
      "service_duration = 12\n"
      "pref_informal = 0.25\n"
      "deadline_alarm = inf\n");
  EXPECT_EQ(p.grid_w, 15);
  EXPECT_EQ(p.grid_h, 15);
  EXPECT_EQ(p.service_duration, 12);
  EXPECT_DOUBLE_EQ(p.pref_informal, 0.25);
  EXPECT_EQ(p.deadline_alarm, kNever);
}

TEST(Config, UnknownKeyReportsItsLine) {
  try {
    parse_config("grid_w = 4\nbogus = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(Config, MalformedValuesAreParseErrors) {
  EXPECT_THROW(parse_config("grid_w = four\n"), ParseError);
  EXPECT_THROW(parse_config("grid_w =\n"), ParseError);
  EXPECT_THROW(parse_config("grid_w 4\n"), ParseError);
  EXPECT_THROW(parse_config("grid_w = 4\ngrid_w = 5\n"), ParseError);
  EXPECT_THROW(parse_config("service_duration = inf\n"), ParseError);
}

TEST(Config, InvalidCombinationIsAValidationError) {
  EXPECT_THROW(parse_config("pc_rate = 0.5\n"), ValidationError);
}

TEST(Config, EveryFieldHasAKey) {
  const auto keys = config_keys();
  EXPECT_EQ(keys.size(), 27u);
  const std::string text = write_config(SimParams{});
  for (auto k : keys) EXPECT_NE(text.find(std::string(k) + " = "), std::string::npos) << k;
}

TEST(Config, MissingFileIsAnIoError) {
  EXPECT_THROW(load_config("/nonexistent/commsim.conf"), IoError);
}

TEST(Config, ShippedDefaultConfigLoads) {
  const auto p = load_config(COMMSIM_DEFAULT_CONFIG);
  EXPECT_EQ(p.grid_w, 15);
  EXPECT_EQ(p.grid_h, 15);
  EXPECT_TRUE(p.violations().empty());
}

// Property: write_config then parse_config is the identity, including
// infinite deadlines and doubles that need all 17 digits.
TEST(Config, RoundTripsRandomParams) {
  RngStream r(99);
  for (int i = 0; i < 500; ++i) {
    SimParams p;
    p.pc_rate = 0.3 * r.uniform01();
    p.ic_rate = 0.3 * r.uniform01();
    p.r_rate = 0.3 * r.uniform01();
    p.n_rate = 1.0 - p.pc_rate - p.ic_rate - p.r_rate;
    p.pref_informal = r.uniform01();
    p.ic_d = 0.1 * r.uniform01();
    p.seed = r.next_u64();
    p.steps = static_cast<Step>(r.index(100000));
    p.deadline_alarm = r.bernoulli(0.3) ? kNever : static_cast<Step>(r.index(100));
    p.deadline_nonurgent = r.bernoulli(0.3) ? kNever : static_cast<Step>(r.index(100));
    ASSERT_TRUE(p.violations().empty());
    EXPECT_EQ(parse_config(write_config(p)), p);
  }
}

// ---- lists ----

TEST(Lists, DoublesAndSeedRanges) {
  EXPECT_EQ(parse_double_list("0.1,0.15, 0.6"), (std::vector<double>{0.1, 0.15, 0.6}));
  EXPECT_EQ(parse_seed_list("1-3,7"), (std::vector<std::uint64_t>{1, 2, 3, 7}));
  EXPECT_EQ(parse_seed_list("18446744073709551614-18446744073709551615").size(), 2u);
  EXPECT_THROW(parse_double_list(""), ParseError);
  EXPECT_THROW(parse_double_list("0.1,,0.2"), ParseError);
  EXPECT_THROW(parse_seed_list("5-2"), ParseError);
  EXPECT_THROW(parse_seed_list("x"), ParseError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

// ---- single run output ----

SimParams small_run() {
  SimParams p;
  p.grid_w = p.grid_h = 10;
  p.steps = 200;
  p.record_every = 10;
  p.seed = 3;
  return p;
}

TEST(RunSingle, CsvHasHeaderRowsAndSummary) {
  const auto path = temp_path("single.csv");
  const auto result = run_single(small_run(), path);
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kSnapshotCsvHeader);
  int rows = 0;
  int comments = 0;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) {
      ++comments;
    } else {
      ++rows;
      EXPECT_EQ(std::count(line.begin(), line.end(), ','), 13);
    }
  }
  EXPECT_EQ(rows, 20);
  EXPECT_GT(comments, 0);
  EXPECT_EQ(result.snapshots.size(), 20u);
  fs::remove(path);
}

TEST(RunSingle, ZeroStepsGivesHeaderOnly) {
  auto p = small_run();
  p.steps = 0;
  const auto path = temp_path("empty.csv");
  const auto result = run_single(p, path);
  EXPECT_TRUE(result.snapshots.empty());
  EXPECT_TRUE(slurp(path).starts_with(std::string(kSnapshotCsvHeader) + "\n#"));
  fs::remove(path);
}

TEST(RunSingle, SameInputsGiveIdenticalBytes) {
  const auto a = temp_path("a.csv");
  const auto b = temp_path("b.csv");
  run_single(small_run(), a);
  run_single(small_run(), b);
  EXPECT_EQ(slurp(a), slurp(b));
  fs::remove(a);
  fs::remove(b);
}

TEST(RunSingle, UnwritablePathIsAnIoError) {
  EXPECT_THROW(run_single(small_run(), "/nonexistent/dir/out.csv"), IoError);
}

TEST(FormatSummary, ListsRolesFailuresAndLatency) {
  RunSummary s;
  s.failures_total = 309;
  s.ave_latency = 16.25;
  const auto text = format_summary(s);
  EXPECT_NE(text.find("PC #"), std::string::npos);
  EXPECT_NE(text.find("Failure 309"), std::string::npos);
  EXPECT_NE(text.find("Latency 16.25"), std::string::npos);
}

// ---- sweeps ----

TEST(Sweep, CouplesRequesterShareToPd) {
  SweepSpec spec;
  spec.values = {0.15, 0.25, 0.60};
  spec.seeds = {1};
  SimParams base;
  base.a_d = 0.15;
  spec.validate(base);
  EXPECT_NEAR(spec.apply(base, 0.15, 1).r_d, 0.70, 1e-12);
  EXPECT_NEAR(spec.apply(base, 0.25, 1).r_d, 0.60, 1e-12);
  EXPECT_NEAR(spec.apply(base, 0.60, 1).r_d, 0.25, 1e-12);
  EXPECT_EQ(spec.apply(base, 0.60, 7).seed, 7u);
}

TEST(Sweep, InfeasibleValueIsRejected) {
  SweepSpec spec;
  spec.values = {0.15, 0.90};
  spec.seeds = {1};
  EXPECT_THROW(spec.validate(SimParams{}), ValidationError);
  spec.values = {0.15};
  spec.seeds = {};
  EXPECT_THROW(spec.validate(SimParams{}), ValidationError);
  spec.seeds = {1};
  spec.parameter = "ic_d";
  EXPECT_THROW(spec.validate(SimParams{}), ValidationError);
}

TEST(Aggregate, MeanAndSampleStddev) {
  std::vector<SweepRow> rows(4);
  rows[0] = {0.1, 1, 10, 1.0, {}};
  rows[1] = {0.1, 2, 20, 3.0, {}};
  rows[2] = {0.1, 3, 30, 5.0, {}};
  rows[3] = {0.6, 1, 4, 0.5, {}};
  const auto agg = aggregate_rows(rows);
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].runs, 3u);
  EXPECT_DOUBLE_EQ(agg[0].failures_mean, 20.0);
  EXPECT_DOUBLE_EQ(agg[0].failures_sd, 10.0);
  EXPECT_DOUBLE_EQ(agg[0].latency_mean, 3.0);
  EXPECT_DOUBLE_EQ(agg[0].latency_sd, 2.0);
  EXPECT_EQ(agg[1].failures_sd, 0.0);
}

TEST(PlotData, SingleSeedHasZeroSpread) {
  std::vector<SweepRow> rows{{0.15, 1, 309, 16.3, {}}, {0.6, 1, 5, 0.2, {}}};
  const auto plot = emit_plot_data(rows);
  ASSERT_EQ(plot.failures.size(), 2u);
  EXPECT_DOUBLE_EQ(plot.failures[0].mean, 309.0);
  EXPECT_EQ(plot.failures[0].stddev, 0.0);
  EXPECT_DOUBLE_EQ(plot.latency[1].mean, 0.2);
  std::ostringstream out;
  write_plot_table(out, plot.failures);
  EXPECT_EQ(out.str(), "p_d\tmean\tstddev\n0.15\t309\t0\n0.6\t5\t0\n");
}

TEST(PlotData, EmptyInputIsAnError) {
  EXPECT_THROW(emit_plot_data({}), std::invalid_argument);
}

std::string sweep_text(unsigned threads) {
  SimParams base;
  base.grid_w = base.grid_h = 8;
  base.steps = 300;
  SweepSpec spec;
  spec.values = {0.6, 0.15};
  spec.seeds = {3, 1, 2};
  const auto result = run_sweep(base, spec, threads);
  std::ostringstream out;
  write_sweep_csv(out, result.rows);
  write_aggregate_table(out, result.aggregate);
  return out.str();
}

TEST(Sweep, OutputDoesNotDependOnThreadCount) {
  const auto serial = sweep_text(1);
  EXPECT_EQ(serial, sweep_text(3));
  EXPECT_EQ(serial, sweep_text(0));
  EXPECT_TRUE(serial.starts_with(std::string(kSweepCsvHeader) + "\n0.15,1,"));
}

}  // namespace
}  // namespace commsim
