#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "commsim/harness.hpp"

namespace commsim {

void write_snapshot_csv(std::ostream& out, const std::vector<Snapshot>& snapshots) {
  out << kSnapshotCsvHeader << '\n';
  for (const Snapshot& s : snapshots) {
    const auto& c = s.census;
    out << s.step << ',' << c[CensusRole::PC].total << ',' << c[CensusRole::PC].idle << ','
        << c[CensusRole::IC].total << ',' << c[CensusRole::IC].idle << ','
        << c[CensusRole::Neutral].total << ',' << c[CensusRole::Alarm].total << ','
        << c[CensusRole::Alarm].idle << ',' << c[CensusRole::Participant].total << ','
        << c[CensusRole::Participant].idle << ',' << c[CensusRole::NonUrgent].total << ','
        << c[CensusRole::NonUrgent].idle << ',' << s.failures_cum << ','
        << format_double(s.mean_wait) << '\n';
  }
}

std::string format_summary(const RunSummary& summary) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  for (std::size_t r = 0; r < kCensusRoles; ++r) {
    const auto role = static_cast<CensusRole>(r);
    out << std::left << std::setw(4) << (std::string(to_string(role)) + " #") << ' '
        << summary.total(role) << "; " << summary.idle(role) << '\n';
  }
  out << "Failure " << summary.failures_total << '\n';
  out << "Latency " << summary.ave_latency << '\n';
  return out.str();
}

RunResult run_single(const SimParams& params, const std::filesystem::path& csv_path) {
  params.validate();
  std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + csv_path.string());
  RunResult result = run(params);
  write_snapshot_csv(out, result.snapshots);
  std::istringstream block(format_summary(result.summary));
  for (std::string line; std::getline(block, line);) out << "# " << line << '\n';
  out.flush();
  if (!out) throw IoError("write failed for " + csv_path.string());
  return result;
}

}  // namespace commsim
