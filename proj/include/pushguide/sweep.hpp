#pragma once

#include <string>
#include <vector>

#include "pushguide/config.hpp"

namespace pushguide {

struct SweepRow {
  std::vector<double> coords;  // one entry per axis, user units
  double objective = 0;        // NaN when the cell errored
  EfficiencyReport report;
  std::string error;           // empty on success
};

struct SweepTable {
  std::vector<std::string> axis_names;
  std::string objective_name;
  std::vector<SweepRow> rows;  // row-major over the axes, axis 1 outermost

  /// Index of the best valid row (ties broken toward smaller |detuning|
  /// when a detuning axis is present); -1 when every cell errored.
  long best_row() const;
};

/// Evaluates the objective on the full grid.  Cells run independently; a
/// failing cell records its error in-row and the sweep continues.  Results
/// are independent of the evaluation order and thread count.
SweepTable run_sweep(const SweepSpec& spec, const RunConfig& base, int threads = 1);

struct OptimizeTracePoint {
  std::vector<double> params;
  double objective = 0;
};

struct OptimizeResult {
  std::vector<double> best_params;
  double best_objective = 0;
  std::vector<OptimizeTracePoint> trace;
  int evaluations = 0;
};

/// Coarse grid seeding (8 points per free dimension) followed by a bounded
/// Nelder-Mead descent on the negated objective.  Deterministic.
OptimizeResult optimize(const OptimizeSpec& spec, const RunConfig& base,
                        int threads = 1);

}  // namespace pushguide
