#include "wbmpc/sim/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace wbmpc {

MetricsSummary computeMetrics(const EpisodeLog& log) {
  MetricsSummary m;
  if (log.records.empty()) {
    m.settlingTime = log.duration;
    return m;
  }
  const auto& records = log.records;
  const scalar_t refFinal = records.back().trackedReference;
  const scalar_t amplitude = std::abs(records.front().trackedValue - refFinal);
  // 2% of the step amplitude (or reference magnitude), floored so hold tasks
  // with an exact zero reference can settle.
  const scalar_t band = std::max(0.02 * std::max(std::abs(refFinal), amplitude), 1e-4);

  // First time the signal enters the band and stays inside to the end.
  int settleIdx = -1;
  for (int i = static_cast<int>(records.size()) - 1; i >= 0; --i) {
    if (std::abs(records[i].trackedValue - records[i].trackedReference) <= band) {
      settleIdx = i;
    } else {
      break;
    }
  }
  if (settleIdx >= 0 && !log.failed) {
    m.settled = true;
    m.settlingTime = records[settleIdx].time;
  } else {
    m.settled = false;
    m.settlingTime = log.duration;
  }

  const std::size_t tailStart = records.size() - std::max<std::size_t>(1, records.size() / 10);
  scalar_t tailErr = 0.0;
  for (std::size_t i = tailStart; i < records.size(); ++i) {
    tailErr += std::abs(records[i].trackedValue - records[i].trackedReference);
  }
  m.steadyStateError = tailErr / static_cast<scalar_t>(records.size() - tailStart);

  scalar_t rollSq = 0.0;
  for (const auto& r : records) {
    rollSq += r.plantState(9) * r.plantState(9);  // base roll channel
  }
  m.rollL2 = std::sqrt(rollSq);

  for (const auto& r : records) {
    m.maxEqualityResidual = std::max(m.maxEqualityResidual, r.auditedEqualityResidual);
    m.maxInequalityViolation = std::max(m.maxInequalityViolation, r.auditedInequalityViolation);
  }

  if (!log.solveTimesMs.empty()) {
    m.meanSolveMs = std::accumulate(log.solveTimesMs.begin(), log.solveTimesMs.end(), 0.0) /
                    static_cast<scalar_t>(log.solveTimesMs.size());
    std::vector<scalar_t> sorted = log.solveTimesMs;
    std::sort(sorted.begin(), sorted.end());
    m.p95SolveMs = sorted[static_cast<std::size_t>(0.95 * (sorted.size() - 1))];
  }

  m.success = !log.failed && m.settled;
  return m;
}

void writeMetricsJson(const MetricsSummary& metrics, const EpisodeLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("writeMetricsJson: cannot open '" + path + "'");
  }
  out << "{\n"
      << "  \"settling_time_s\": " << metrics.settlingTime << ",\n"
      << "  \"settled\": " << (metrics.settled ? "true" : "false") << ",\n"
      << "  \"steady_state_error\": " << metrics.steadyStateError << ",\n"
      << "  \"roll_l2_norm\": " << metrics.rollL2 << ",\n"
      << "  \"max_equality_residual\": " << metrics.maxEqualityResidual << ",\n"
      << "  \"max_inequality_violation\": " << metrics.maxInequalityViolation << ",\n"
      << "  \"mean_solve_ms\": " << metrics.meanSolveMs << ",\n"
      << "  \"p95_solve_ms\": " << metrics.p95SolveMs << ",\n"
      << "  \"episode_failed\": " << (log.failed ? "true" : "false") << ",\n"
      << "  \"failure\": \"" << log.failure << "\",\n"
      << "  \"success\": " << (metrics.success ? "true" : "false") << "\n"
      << "}\n";
}

}  // namespace wbmpc
