#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "commsim/harness.hpp"

namespace commsim {

void SweepSpec::validate(const SimParams& base) const {
  std::vector<std::string> errors;
  if (parameter != "p_d") errors.push_back("unsupported sweep parameter `" + parameter + "`");
  if (values.empty()) errors.push_back("sweep needs at least one value");
  if (seeds.empty()) errors.push_back("sweep needs at least one seed");
  for (double v : values) {
    const double r_d = 1.0 - base.a_d - v;
    if (v < 0.0 || v > 1.0) {
      errors.push_back("p_d = " + format_double(v) + " outside [0, 1]");
    } else if (r_d < -kRateTolerance) {
      errors.push_back("p_d = " + format_double(v) + " makes r_d = 1 - a_d - p_d = " +
                       format_double(r_d) + " negative");
    }
  }
  if (errors.empty()) {
    for (double v : values) {
      for (auto& e : apply(base, v, base.seed).violations()) errors.push_back(std::move(e));
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

SimParams SweepSpec::apply(const SimParams& base, double value, std::uint64_t seed) const {
  SimParams p = base;
  p.p_d = value;
  p.r_d = std::max(0.0, 1.0 - base.a_d - value);
  p.seed = seed;
  return p;
}

SweepResult run_sweep(const SimParams& base, const SweepSpec& spec, unsigned threads) {
  spec.validate(base);

  struct Job {
    double value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double v : spec.values) {
    for (std::uint64_t s : spec.seeds) jobs.push_back({v, s});
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return a.value != b.value ? a.value < b.value : a.seed < b.seed;
  });

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto result = run(spec.apply(base, jobs[i].value, jobs[i].seed));
        rows[i] = {jobs[i].value, jobs[i].seed, result.summary.failures_total,
                   result.summary.ave_latency, result.summary};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.rows = std::move(rows);
  result.aggregate = aggregate_rows(result.rows);
  return result;
}

std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows) {
  std::vector<SweepAggregate> out;
  auto sample_sd = [](const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
  };
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    std::vector<double> failures;
    std::vector<double> latency;
    double f_sum = 0.0;
    double l_sum = 0.0;
    for (; j < rows.size() && rows[j].p_d == rows[i].p_d; ++j) {
      failures.push_back(static_cast<double>(rows[j].failures_total));
      latency.push_back(rows[j].ave_latency);
      f_sum += failures.back();
      l_sum += latency.back();
    }
    SweepAggregate agg;
    agg.p_d = rows[i].p_d;
    agg.runs = j - i;
    agg.failures_mean = f_sum / static_cast<double>(agg.runs);
    agg.latency_mean = l_sum / static_cast<double>(agg.runs);
    agg.failures_sd = sample_sd(failures, agg.failures_mean);
    agg.latency_sd = sample_sd(latency, agg.latency_mean);
    out.push_back(agg);
    i = j;
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  constexpr std::array kOrder{CensusRole::PC,    CensusRole::IC,          CensusRole::Neutral,
                              CensusRole::Alarm, CensusRole::Participant, CensusRole::NonUrgent};
  for (const SweepRow& row : rows) {
    out << format_double(row.p_d) << ',' << row.seed << ',' << row.failures_total << ','
        << format_double(row.ave_latency);
    for (CensusRole r : kOrder) {
      out << ',' << format_double(row.summary.total(r));
      // The snapshot CSV carries no separate neutral idle column.
      if (r != CensusRole::Neutral) out << ',' << format_double(row.summary.idle(r));
    }
    out << '\n';
  }
}

void write_aggregate_table(std::ostream& out, const std::vector<SweepAggregate>& aggregate) {
  out << "p_d\truns\tfailures_mean\tfailures_sd\tlatency_mean\tlatency_sd\n";
  for (const auto& a : aggregate) {
    out << format_double(a.p_d) << '\t' << a.runs << '\t' << format_double(a.failures_mean)
        << '\t' << format_double(a.failures_sd) << '\t' << format_double(a.latency_mean) << '\t'
        << format_double(a.latency_sd) << '\n';
  }
}

PlotTables emit_plot_data(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("emit_plot_data: no sweep rows");
  std::vector<SweepRow> sorted = rows;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.p_d < b.p_d; });
  PlotTables tables;
  for (const auto& a : aggregate_rows(sorted)) {
    tables.failures.push_back({a.p_d, a.failures_mean, a.failures_sd});
    tables.latency.push_back({a.p_d, a.latency_mean, a.latency_sd});
  }
  return tables;
}

void write_plot_table(std::ostream& out, const std::vector<PlotPoint>& points) {
  out << "p_d\tmean\tstddev\n";
  for (const auto& p : points) {
    out << format_double(p.p_d) << '\t' << format_double(p.mean) << '\t'
        << format_double(p.stddev) << '\n';
  }
}

namespace {

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto comma = text.find(',');
    auto part = text.substr(0, comma);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (part.empty()) throw ParseError(0, "empty item in list");
    parts.push_back(part);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return parts;
}

template <class T>
T parse_item(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(0, "bad list item `" + std::string(s) + "`");
  }
  return v;
}

}  // namespace

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split_commas(text)) out.push_back(parse_item<double>(part));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (auto part : split_commas(text)) {
    const auto dash = part.find('-');
    if (dash == std::string_view::npos) {
      out.push_back(parse_item<std::uint64_t>(part));
      continue;
    }
    const auto lo = parse_item<std::uint64_t>(part.substr(0, dash));
    const auto hi = parse_item<std::uint64_t>(part.substr(dash + 1));
    if (hi < lo) throw ParseError(0, "descending seed range `" + std::string(part) + "`");
    for (auto s = lo;; ++s) {
      out.push_back(s);
      if (s == hi) break;
    }
  }
  return out;
}

}  // namespace commsim
