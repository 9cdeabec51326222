// Config file parsing, CSV schemas, and canonical number formatting for the
// batch front end.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "svalse/metrics.hpp"
#include "svalse/simkit.hpp"
#include "svalse/tracker.hpp"

namespace svalse {

/// Bad configuration file or values (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad data file (CLI exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ArrayGeometry geometry;
  EstimatorConfig estimator;
  MetricConfig metric;
  Scenario scenario;
  std::vector<double> snr_db{20.0};
  int n_runs = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  int threads = 1;
};

/// Parses the JSON config tree; unknown scenario names, missing keys, and
/// type mismatches raise ConfigError with the offending key path.
RunConfig load_config(const std::string& path);

/// Canonical full-round-trip decimal formatting ("%.17g").
std::string fmt_double(double v);

// Snapshot CSV: header `t,re_0,im_0,...,re_{M-1},im_{M-1}`, one row per step.
void write_snapshots(const std::string& path, const std::vector<Snapshot>& snaps);
std::vector<Snapshot> parse_snapshots(const std::string& path);

// Truth CSV: `t,source_id,doa_deg,amp_re,amp_im`.
void write_truth(const std::string& path, const Truth& truth);

// Track CSV: `run,t,component_id,doa_deg,pa_rad,kappa,w_re,w_im`.
struct RunTrackRow {
  int run = 0;
  TrackRecord rec;
};
void write_tracks(const std::string& path, const std::vector<RunTrackRow>& rows);

// Metrics CSV:
// `run,method,snr_db,t,gospa_total,gospa_dist,gospa_miss,gospa_false,rmse,n_true,n_est`.
struct MetricsRow {
  int run = 0;
  std::string method;
  double snr_db = 0.0;
  int t = 0;
  GospaBreakdown gospa;
  double rmse = 0.0;
  int n_true = 0;
  int n_est = 0;
};
void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows);

// Aggregate CSV: `method,snr_db,gospa_total,gospa_dist,gospa_miss,gospa_false,rmse`.
struct SummaryRow {
  std::string method;
  double snr_db = 0.0;
  MetricSummary summary;
};
void write_summary(const std::string& path, const std::vector<SummaryRow>& rows);

} // namespace svalse
