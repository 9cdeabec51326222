// Multi-target DOA scoring: GOSPA with distance/missed/false decomposition,
// cutoff RMSE, and optimal assignment.
#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace svalse {

struct GospaBreakdown {
  double total = 0.0;
  double dist = 0.0;
  double miss = 0.0;
  double false_ = 0.0;
};

struct MetricConfig {
  double c = 10.0;       // GOSPA cutoff [deg]
  double c_prime = 10.0; // RMSE max error [deg]
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, O(n^3)); returns (row, col) pairs sorted by row.
/// Deterministic for tied optima.
std::vector<std::pair<int, int>> assign(const Eigen::MatrixXd& cost);

/// GOSPA with alpha = 2, p = 1: pairs are assigned iff their absolute DOA
/// difference is within the cutoff; each unassigned element costs c/2.
GospaBreakdown gospa(const std::vector<double>& truth_deg,
                     const std::vector<double>& est_deg, const MetricConfig& cfg);

/// Assignment-minimized RMSE with a per-missed-truth penalty of c'^2.
/// Throws std::domain_error for an empty truth set.
double rmse(const std::vector<double>& truth_deg,
            const std::vector<double>& est_deg, const MetricConfig& cfg);

struct MetricRow {
  GospaBreakdown gospa;
  double rmse = 0.0; // NaN when undefined (empty truth)
};

struct MetricSummary {
  GospaBreakdown gospa;
  double rmse = 0.0;
  int rmse_count = 0; // rows with a defined RMSE
};

/// Arithmetic mean per field; RMSE averaged over rows where it is defined.
MetricSummary average_metrics(const std::vector<MetricRow>& rows);

} // namespace svalse
