#include "svalse/simkit.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace svalse {

std::vector<double> Truth::doas(int t) const {
  if (t < 1 || t > t_max) throw std::out_of_range("Truth::doas: step out of range");
  std::vector<double> out;
  out.reserve(steps[t - 1].size());
  for (const TruthEntry& e : steps[t - 1]) out.push_back(e.doa_deg);
  return out;
}

Truth build_truth(const std::vector<SourceSpec>& specs, int t_max,
                  std::uint64_t seed) {
  if (t_max < 1) throw std::invalid_argument("build_truth: t_max must be >= 1");
  for (const SourceSpec& s : specs) {
    if (std::abs(s.initial_doa) > 90.0)
      throw std::invalid_argument("build_truth: initial DOA outside [-90, 90]");
    if (s.t_end < s.t_start)
      throw std::invalid_argument("build_truth: empty activation window");
  }

  Truth truth;
  truth.t_max = t_max;
  truth.steps.assign(t_max, {});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  // Draws are consumed source-major then step-major, independently of
  // activation windows, so one source's schedule never shifts another's path.
  for (int k = 0; k < int(specs.size()); ++k) {
    const SourceSpec& spec = specs[k];
    double doa = spec.initial_doa;
    for (int t = 1; t <= t_max; ++t) {
      if (t > 1 && spec.motion.kind == MotionModel::Kind::RandomWalk) {
        doa += spec.motion.std_deg * unit(rng);
        doa = std::clamp(doa, -90.0, 90.0);
      }
      cplx amp = spec.amplitude.fixed;
      if (spec.amplitude.kind == AmplitudeModel::Kind::Gaussian) {
        const double sd = std::sqrt(spec.amplitude.variance / 2.0);
        amp = cplx(sd * unit(rng), sd * unit(rng));
      }
      if (t >= spec.t_start && t <= spec.t_end)
        truth.steps[t - 1].push_back({k, doa, amp});
    }
  }
  return truth;
}

std::vector<Snapshot> synthesize(const Truth& truth, const ArrayGeometry& geom,
                                 double snr_db, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const bool noiseless = std::isinf(snr_db) && snr_db > 0.0;
  const double snr_lin = noiseless ? 0.0 : std::pow(10.0, snr_db / 10.0);

  std::vector<Snapshot> snaps;
  snaps.reserve(truth.t_max);
  double last_power = 0.0;
  for (int t = 1; t <= truth.t_max; ++t) {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(geom.m_sensors);
    for (const TruthEntry& e : truth.steps[t - 1])
      y += e.amplitude * steering(geom, doa_to_pa(geom, e.doa_deg));
    if (!noiseless) {
      double power = y.squaredNorm();
      if (power > 0.0)
        last_power = power;
      else
        power = last_power; // all-inactive step: reuse last signal power
      if (power > 0.0) {
        const double nu = power / (double(geom.m_sensors) * snr_lin);
        const double sd = std::sqrt(nu / 2.0);
        for (int m = 0; m < geom.m_sensors; ++m)
          y[m] += cplx(sd * unit(rng), sd * unit(rng));
      }
    }
    snaps.push_back({t, std::move(y)});
  }
  return snaps;
}

Eigen::VectorXd cbf(const ArrayGeometry& geom, const Eigen::VectorXcd& y,
                    const std::vector<double>& grid_deg) {
  if (grid_deg.empty()) throw std::invalid_argument("cbf: empty grid");
  const double m2 = double(geom.m_sensors) * double(geom.m_sensors);
  Eigen::VectorXd p(grid_deg.size());
  for (size_t i = 0; i < grid_deg.size(); ++i) {
    const Eigen::VectorXcd a = steering(geom, doa_to_pa(geom, grid_deg[i]));
    p[i] = std::norm(a.dot(y)) / m2;
  }
  return p;
}

namespace {

ArrayGeometry paper_array() {
  // 15-element half-wavelength ULA: d = 3.75 m, c = 1500 m/s, f = 200 Hz.
  return ArrayGeometry::from_frequency(15, 3.75, 1500.0, 200.0);
}

SourceSpec gaussian_source(double doa, MotionModel motion, int t_start, int t_end) {
  SourceSpec s;
  s.initial_doa = doa;
  s.amplitude.kind = AmplitudeModel::Kind::Gaussian;
  s.amplitude.variance = 1.0;
  s.motion = motion;
  s.t_start = t_start;
  s.t_end = t_end;
  return s;
}

} // namespace

Scenario scenario_fig4() {
  Scenario sc;
  sc.geometry = paper_array();
  sc.t_max = 50;
  const MotionModel still{MotionModel::Kind::Static, 0.0};
  const MotionModel walk{MotionModel::Kind::RandomWalk, 1.5};
  const int tend = std::numeric_limits<int>::max();
  sc.sources = {
      gaussian_source(-70.0, still, 1, tend), gaussian_source(-55.0, still, 1, tend),
      gaussian_source(-40.0, walk, 1, tend),  gaussian_source(35.0, walk, 1, tend),
      gaussian_source(50.0, still, 1, tend),  gaussian_source(65.0, still, 1, tend)};
  return sc;
}

Scenario scenario_fig6() {
  // Pairs deactivate in order of decreasing angle: (65, 50) after step 12,
  // (35, -40) after step 24, (-55, -70) after step 36.
  Scenario sc = scenario_fig4();
  auto window = [&](double doa, int t_end) {
    for (SourceSpec& s : sc.sources)
      if (s.initial_doa == doa) s.t_end = t_end;
  };
  window(65.0, 12);
  window(50.0, 12);
  window(35.0, 24);
  window(-40.0, 24);
  window(-55.0, 36);
  window(-70.0, 36);
  return sc;
}

Scenario scenario_one() {
  Scenario sc;
  sc.geometry = paper_array();
  sc.t_max = 50;
  auto fixed_source = [](double doa) {
    SourceSpec s;
    s.initial_doa = doa;
    s.amplitude.kind = AmplitudeModel::Kind::Fixed;
    s.amplitude.fixed = cplx(10.0, 0.0);
    s.motion = {MotionModel::Kind::Static, 0.0};
    return s;
  };
  sc.sources = {fixed_source(-3.0), fixed_source(2.0), fixed_source(60.0)};
  return sc;
}

Scenario canned_scenario(const std::string& name) {
  if (name == "fig4") return scenario_fig4();
  if (name == "fig6") return scenario_fig6();
  if (name == "scenario1") return scenario_one();
  throw std::invalid_argument("unknown canned scenario: " + name);
}

} // namespace svalse
