// commsim: run single simulations or participant-rate sweeps from a config file.
//
// Exit codes: 0 success, 1 validation/parse error, 2 I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commsim/harness.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw commsim::IoError("cannot write " + path.string());
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw commsim::IoError("write failed for " + path.string());
}

struct SimulateArgs {
  fs::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> steps;
  std::optional<std::int64_t> record_every;
  fs::path out;
};

struct SweepArgs {
  fs::path config;
  std::string p_d;
  std::string seeds;
  fs::path out;
  std::optional<fs::path> plot_out;
  unsigned threads = 0;
};

int run_simulate(const SimulateArgs& args) {
  commsim::SimParams params = commsim::load_config(args.config);
  if (args.seed) params.seed = *args.seed;
  if (args.steps) params.steps = *args.steps;
  if (args.record_every) params.record_every = *args.record_every;
  const auto result = commsim::run_single(params, args.out);
  std::cout << commsim::format_summary(result.summary);
  std::cout << "snapshots " << result.snapshots.size() << " -> " << args.out.string() << '\n';
  return 0;
}

int run_sweep(const SweepArgs& args) {
  const commsim::SimParams base = commsim::load_config(args.config);
  commsim::SweepSpec spec;
  spec.values = commsim::parse_double_list(args.p_d);
  spec.seeds = commsim::parse_seed_list(args.seeds);
  spec.validate(base);

  // Open outputs before the (long) sweep so path errors surface early.
  auto out = open_output(args.out);
  std::optional<std::ofstream> failures_out;
  std::optional<std::ofstream> latency_out;
  fs::path failures_path;
  fs::path latency_path;
  if (args.plot_out) {
    failures_path = fs::path(args.plot_out->string() + ".failures.tsv");
    latency_path = fs::path(args.plot_out->string() + ".latency.tsv");
    failures_out = open_output(failures_path);
    latency_out = open_output(latency_path);
  }

  const auto result = commsim::run_sweep(base, spec, args.threads);
  commsim::write_sweep_csv(out, result.rows);
  close_output(out, args.out);
  if (args.plot_out) {
    const auto tables = commsim::emit_plot_data(result.rows);
    commsim::write_plot_table(*failures_out, tables.failures);
    commsim::write_plot_table(*latency_out, tables.latency);
    close_output(*failures_out, failures_path);
    close_output(*latency_out, latency_path);
  }
  commsim::write_aggregate_table(std::cout, result.aggregate);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutual-assistance community simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write a snapshot CSV");
  simulate->add_option("--config", sim.config, "Config file (key = value lines)")->required();
  simulate->add_option("--seed", sim.seed, "Override the RNG seed");
  simulate->add_option("--steps", sim.steps, "Override the step count");
  simulate->add_option("--record-every", sim.record_every, "Override the snapshot period");
  simulate->add_option("--out", sim.out, "Snapshot CSV path")->required();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep the participant churn rate p_d");
  sweep_cmd->add_option("--config", sweep.config, "Base config file")->required();
  sweep_cmd->add_option("--p-d", sweep.p_d, "Comma-separated p_d values")->required();
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds, e.g. 1-20 or 3,5,8")->required();
  sweep_cmd->add_option("--out", sweep.out, "Per-run CSV path")->required();
  sweep_cmd->add_option("--plot-out", sweep.plot_out,
                        "Prefix for <prefix>.failures.tsv and <prefix>.latency.tsv");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*simulate) return run_simulate(sim);
    return run_sweep(sweep);
  } catch (const commsim::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const commsim::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const commsim::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}
