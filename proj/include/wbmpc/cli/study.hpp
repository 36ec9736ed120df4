#pragma once

#include "wbmpc/cli/runner.hpp"

namespace wbmpc {

/// One template-model variant of the comparative lifting study.
struct StudyRow {
  std::string variant;
  bool feasible = false;
  scalar_t minLiftTime = 0.0;     // smallest grid time that succeeds
  scalar_t settlingTime = 0.0;    // at that lift time
  scalar_t meanSolveMs = 0.0;
};

struct StudyResult {
  std::vector<StudyRow> rows;  // centroidal+object, centroidal, srbd+object, srbd
};

/// Sweeps the reference lifting-time grid for the four template models
/// (centroidal/SRBD, with/without object in the planner) and reports the
/// minimum feasible time per variant.
StudyResult comparativeStudy(const Scenario& scenario, const RunFlags& flags);

void writeStudyCsv(const StudyResult& result, const std::string& path);
std::string studyTable(const StudyResult& result);

int runStudyFile(const std::string& path, const RunFlags& flags);

}  // namespace wbmpc
