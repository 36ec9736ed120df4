#pragma once

#include <string>

#include "wbmpc/sim/episode.hpp"

namespace wbmpc {

struct MetricsSummary {
  scalar_t settlingTime = 0.0;  // first entry into the 2% band that holds to the end
  bool settled = false;
  scalar_t steadyStateError = 0.0;     // mean |tracked - ref| over the last 10%
  scalar_t rollL2 = 0.0;               // discrete l2 norm of the base roll signal
  scalar_t maxEqualityResidual = 0.0;  // audited, over the episode
  scalar_t maxInequalityViolation = 0.0;
  scalar_t meanSolveMs = 0.0;
  scalar_t p95SolveMs = 0.0;
  bool success = false;  // completed without divergence and settled
};

MetricsSummary computeMetrics(const EpisodeLog& log);

void writeMetricsJson(const MetricsSummary& metrics, const EpisodeLog& log, const std::string& path);

}  // namespace wbmpc
