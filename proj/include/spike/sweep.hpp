#pragma once

#include <vector>

#include "spike/asymptotics.hpp"
#include "spike/symmetry.hpp"

namespace spike {

/// One d of a unit-disk sweep: test-function level, ground state solved from
/// the test function, and the diagnostics of that solve.
struct SweepRow {
  double d = 0;
  double m_d = 0;
  double M_test = 0;
  double t0 = 0;
  double t0_golden = 0;
  bool peak_on_boundary = false;
  ConcentrationMetrics concentration;
  double budget = 0;
  SymmetryReport symmetry;
};

struct SweepOptions {
  double cells_per_sqrt_d = 16;
  int threads = 1;
  bool keep_solves = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Fitted coefficients; only filled when there are at least two rows.
  std::optional<ExpansionReport> expansion;
  /// Solve reports in row order when keep_solves is set.
  std::vector<SolveReport> solves;
};

/// Sweep on the unit disk at P = (0, -1) with disk_mesh_policy meshes.
/// d values must be positive and strictly decreasing. Rows are independent
/// and are computed on up to options.threads workers; the result does not
/// depend on the worker count.
SweepResult run_disk_sweep(const std::vector<double>& d_list, const RadialProfile& profile,
                           const SweepOptions& options = {});

/// Expansion coefficients of a unit-disk sweep from its rows (at least two).
ExpansionReport fit_sweep_rows(const std::vector<SweepRow>& rows, const RadialProfile& profile);

/// Worker cap from NB_THREADS, else the machine's hardware concurrency.
int worker_count();

}  // namespace spike
