#include "svalse/model.hpp"

#include <cmath>
#include <stdexcept>

namespace svalse {

ArrayGeometry ArrayGeometry::make(int m_sensors, double spacing,
                                  double sound_speed, double omega) {
  if (m_sensors < 2)
    throw std::invalid_argument("ArrayGeometry: need at least 2 sensors");
  if (!(spacing > 0.0) || !(sound_speed > 0.0) || !(omega > 0.0))
    throw std::invalid_argument("ArrayGeometry: spacing, sound_speed, omega must be > 0");
  if (spacing > sound_speed * kPi / omega * (1.0 + 1e-12))
    throw std::invalid_argument("ArrayGeometry: spacing violates d <= c*pi/omega");
  return ArrayGeometry{m_sensors, spacing, sound_speed, omega};
}

ArrayGeometry ArrayGeometry::from_frequency(int m_sensors, double spacing,
                                            double sound_speed, double freq_hz) {
  return make(m_sensors, spacing, sound_speed, kTwoPi * freq_hz);
}

std::vector<int> PosteriorState::active_indices() const {
  std::vector<int> idx;
  for (int l = 0; l < int(s_hat.size()); ++l)
    if (s_hat[l]) idx.push_back(l);
  return idx;
}

void EstimatorConfig::validate() const {
  if (l_components < 1)
    throw std::invalid_argument("EstimatorConfig: l_components must be >= 1");
  auto in01 = [](double p) { return p > 0.0 && p < 1.0; };
  if (!in01(p_act) || !in01(p_deact) || !in01(rho0))
    throw std::invalid_argument("EstimatorConfig: p_act, p_deact, rho0 must lie in (0,1)");
  if (!(kappa_r > 0.0))
    throw std::invalid_argument("EstimatorConfig: kappa_r must be > 0");
  if (prune_d < 1) throw std::invalid_argument("EstimatorConfig: prune_d must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("EstimatorConfig: max_iter must be >= 1");
  if (!(theta_tol > 0.0))
    throw std::invalid_argument("EstimatorConfig: theta_tol must be > 0");
}

Eigen::VectorXcd steering(const ArrayGeometry& geom, double theta) {
  Eigen::VectorXcd a(geom.m_sensors);
  for (int m = 0; m < geom.m_sensors; ++m) a[m] = std::polar(1.0, double(m) * theta);
  return a;
}

double doa_to_pa(const ArrayGeometry& geom, double beta_deg) {
  if (!(std::abs(beta_deg) <= 90.0))
    throw std::domain_error("doa_to_pa: DOA outside [-90, 90] degrees");
  return -geom.phase_scale() * std::sin(beta_deg * kPi / 180.0);
}

double pa_to_doa(const ArrayGeometry& geom, double theta) {
  double s = -theta / geom.phase_scale();
  if (std::abs(s) > 1.0 + 1e-9)
    throw std::domain_error("pa_to_doa: pseudo angle outside the visible region");
  s = std::clamp(s, -1.0, 1.0);
  return std::asin(s) * 180.0 / kPi;
}

Eigen::VectorXcd expected_steering(const VonMises& vm, int m_sensors) {
  Eigen::VectorXcd a(m_sensors);
  a[0] = cplx(1.0, 0.0);
  if (m_sensors == 1) return a;
  if (vm.kappa >= kKappaCap) {
    for (int m = 1; m < m_sensors; ++m) a[m] = std::polar(1.0, double(m) * vm.mu);
    return a;
  }
  if (vm.kappa == 0.0) {
    a.tail(m_sensors - 1).setZero();
    return a;
  }
  const Eigen::VectorXd r = bessel_ratios_upto(m_sensors - 1, vm.kappa);
  for (int m = 1; m < m_sensors; ++m) a[m] = std::polar(r[m], double(m) * vm.mu);
  return a;
}

} // namespace svalse
