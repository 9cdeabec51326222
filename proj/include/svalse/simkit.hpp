// Synthetic scenario construction and snapshot synthesis: ground-truth tracks
// with motion and activation schedules, amplitude models, SNR-calibrated
// noise, and a conventional-beamforming spectrum for plots.
#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "svalse/model.hpp"

namespace svalse {

struct AmplitudeModel {
  enum class Kind { Gaussian, Fixed };
  Kind kind = Kind::Gaussian;
  double variance = 1.0; // Gaussian: E|alpha|^2
  cplx fixed{10.0, 0.0};
};

struct MotionModel {
  enum class Kind { Static, RandomWalk };
  Kind kind = Kind::Static;
  double std_deg = 1.5; // per-step increment standard deviation
};

struct SourceSpec {
  double initial_doa = 0.0; // [deg], |.| <= 90
  AmplitudeModel amplitude;
  MotionModel motion;
  int t_start = 1;
  int t_end = std::numeric_limits<int>::max();
};

struct TruthEntry {
  int source_id = 0;
  double doa_deg = 0.0;
  cplx amplitude{0.0, 0.0};
};

/// Ground-truth tracks; steps[t-1] lists the sources active at step t.
struct Truth {
  int t_max = 0;
  std::vector<std::vector<TruthEntry>> steps;

  std::vector<double> doas(int t) const;
};

/// Scenario = geometry + sources + horizon, used by the CLI and benchmarks.
struct Scenario {
  ArrayGeometry geometry;
  std::vector<SourceSpec> sources;
  int t_max = 50;
};

/// Deterministic per seed. Random-walk motion draws per-step Gaussian
/// increments in degrees and clips tracks to [-90, 90]; activation windows
/// gate presence.
Truth build_truth(const std::vector<SourceSpec>& specs, int t_max,
                  std::uint64_t seed);

/// y_t = sum_k alpha_{k,t} a(theta_{k,t}) + noise, with the per-step noise
/// variance set from the realized signal power so the target SNR holds in
/// expectation. snr_db = +inf produces exactly noiseless snapshots. Steps
/// with no active source reuse the most recent nonzero signal power.
std::vector<Snapshot> synthesize(const Truth& truth, const ArrayGeometry& geom,
                                 double snr_db, std::uint64_t seed);

/// Conventional (Bartlett) beamformer power |a(theta)^H y|^2 / M^2 over a
/// DOA grid in degrees.
Eigen::VectorXd cbf(const ArrayGeometry& geom, const Eigen::VectorXcd& y,
                    const std::vector<double>& grid_deg);

/// Canned simulation setups (half-wavelength 15-element array at 200 Hz).
Scenario scenario_fig4();
Scenario scenario_fig6();
Scenario scenario_one();

/// Lookup by name ("fig4", "fig6", "scenario1"); throws std::invalid_argument
/// for unknown names.
Scenario canned_scenario(const std::string& name);

} // namespace svalse
