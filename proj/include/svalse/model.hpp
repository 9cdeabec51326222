// Array geometry, steering vectors, pseudo-angle/DOA conversion, and the
// estimator's belief/state records shared by the update and tracking layers.
#pragma once

#include <vector>

#include <Eigen/Core>

#include "svalse/circular.hpp"

namespace svalse {

/// Uniform linear array driven at a single angular frequency.
struct ArrayGeometry {
  int m_sensors = 0;     // M >= 2
  double spacing = 0.0;  // d [m]
  double sound_speed = 0.0; // c [m/s]
  double omega = 0.0;    // [rad/s]

  /// Electrical phase increment per sensor per unit sin(beta): omega*d/c.
  double phase_scale() const { return omega * spacing / sound_speed; }

  /// Validates positivity and the spatial sampling bound d <= c*pi/omega.
  static ArrayGeometry make(int m_sensors, double spacing, double sound_speed,
                            double omega);
  /// Convenience constructor from frequency in Hz.
  static ArrayGeometry from_frequency(int m_sensors, double spacing,
                                      double sound_speed, double freq_hz);
};

struct Snapshot {
  int t = 1; // 1-based time-step index
  Eigen::VectorXcd y;
};

/// Belief about one of the L potential sources.
struct ComponentBelief {
  VonMises theta;
  double active_prob = 0.5;
  bool was_active_any_iter = false;
};

/// Full per-time-step estimator state.
struct PosteriorState {
  std::vector<ComponentBelief> beliefs;
  std::vector<std::uint8_t> s_hat;   // length L, entries 0/1
  Eigen::VectorXcd w_hat;            // over active set, ascending index order
  Eigen::MatrixXcd c_hat;            // Hermitian PD over active set
  double nu = 1.0;
  double tau = 1.0;

  struct Diagnostics {
    bool tau_clamped = false;
    bool nu_clamped = false;
    bool jitter_applied = false;
    // The amplitude variance traces back to fitted sources (possibly through
    // earlier steps) rather than to the power-identity initializer.
    bool tau_from_sources = false;
  } diag;

  std::vector<int> active_indices() const;
};

struct EstimatorConfig {
  int l_components = 15;  // L
  double p_act = 0.10;    // p^a
  double p_deact = 0.25;  // p^d
  double kappa_r = 148.0; // transition concentration
  int prune_d = 4;        // D
  double rho0 = 0.5;      // initial activation probability at t = 1
  int max_iter = 200;     // P
  double theta_tol = 1e-6;      // [rad]
  double snr_init_db = 20.0;    // measurement-to-noise ratio assumed at init

  void validate() const;
};

/// a(theta) = [1, e^{j theta}, ..., e^{j(M-1) theta}].
Eigen::VectorXcd steering(const ArrayGeometry& geom, double theta);

/// theta = -(omega d / c) sin(beta), beta in degrees within [-90, 90].
double doa_to_pa(const ArrayGeometry& geom, double beta_deg);

/// Inverse of doa_to_pa on its range; throws std::domain_error for pseudo
/// angles outside the visible region.
double pa_to_doa(const ArrayGeometry& geom, double theta);

/// E[a(theta)] elementwise under the von Mises belief; element m is the m-th
/// characteristic function value. kappa at or above the cap is treated as a
/// point mass.
Eigen::VectorXcd expected_steering(const VonMises& vm, int m_sensors);

} // namespace svalse
