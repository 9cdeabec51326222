// Independent reference computations used by the test suites: continued
// fractions and power series for Bessel ratios, periodic quadrature, and
// brute-force assignment enumeration. These deliberately avoid the library's
// own evaluation paths.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// I_{nu+1}(x)/I_nu(x) by the Gauss continued fraction, modified Lentz.
inline double cf_ratio_step(double nu, double x) {
  const double tiny = 1e-300;
  double f = tiny, c = tiny, d = 0.0;
  for (long k = 1; k <= 4000000; ++k) {
    const double b = 2.0 * (nu + double(k)) / x;
    d = b + d;
    if (d == 0.0) d = tiny;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

// I_m(x)/I_0(x) as a telescoping product of continued fractions.
inline double cf_bessel_ratio(int m, double x) {
  if (m == 0) return 1.0;
  if (x == 0.0) return 0.0;
  double r = 1.0;
  for (int k = 0; k < m; ++k) r *= cf_ratio_step(double(k), x);
  return r;
}

// Power series evaluation of I_m(x) (unscaled; for moderate x only).
inline double series_bessel_i(int m, double x) {
  double term = std::pow(0.5 * x, m) / std::tgamma(double(m) + 1.0);
  double sum = term;
  const double q = 0.25 * x * x;
  for (int k = 1; k <= 400; ++k) {
    term *= q / (double(k) * double(m + k));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Periodic trapezoid rule over [-pi, pi); spectrally accurate for smooth
// periodic integrands.
inline double integrate_circle(const std::function<double(double)>& f, int n) {
  const double h = 2.0 * kPi / double(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(-kPi + double(i) * h);
  return s * h;
}

inline std::complex<double> integrate_circle_cplx(
    const std::function<std::complex<double>(double)>& f, int n) {
  const double h = 2.0 * kPi / double(n);
  std::complex<double> s(0.0, 0.0);
  for (int i = 0; i < n; ++i) s += f(-kPi + double(i) * h);
  return s * h;
}

// Exhaustive minimization over all partial assignments between two DOA sets.
struct BruteGospa {
  double total = 0.0, dist = 0.0, miss = 0.0, false_ = 0.0;
};

namespace detail {

inline void gospa_rec(const std::vector<double>& truth,
                      const std::vector<double>& est, double c, size_t i,
                      unsigned used, double dist_acc, int assigned,
                      BruteGospa& best) {
  if (i == truth.size()) {
    BruteGospa cand;
    cand.dist = dist_acc;
    cand.miss = c * double(int(truth.size()) - assigned) / 2.0;
    cand.false_ = c * double(int(est.size()) - assigned) / 2.0;
    cand.total = cand.dist + cand.miss + cand.false_;
    if (cand.total < best.total) best = cand;
    return;
  }
  gospa_rec(truth, est, c, i + 1, used, dist_acc, assigned, best); // truth i missed
  for (size_t j = 0; j < est.size(); ++j) {
    if (used & (1u << j)) continue;
    gospa_rec(truth, est, c, i + 1, used | (1u << j),
              dist_acc + std::abs(truth[i] - est[j]), assigned + 1, best);
  }
}

inline void rmse_rec(const std::vector<double>& truth,
                     const std::vector<double>& est, double cp, size_t i,
                     unsigned used, double sq_acc, int assigned, double& best) {
  if (i == truth.size()) {
    const double val =
        sq_acc + cp * cp * double(int(truth.size()) - assigned);
    best = std::min(best, val);
    return;
  }
  rmse_rec(truth, est, cp, i + 1, used, sq_acc, assigned, best);
  for (size_t j = 0; j < est.size(); ++j) {
    if (used & (1u << j)) continue;
    const double d = truth[i] - est[j];
    rmse_rec(truth, est, cp, i + 1, used | (1u << j), sq_acc + d * d,
             assigned + 1, best);
  }
}

} // namespace detail

inline BruteGospa brute_gospa(const std::vector<double>& truth,
                              const std::vector<double>& est, double c) {
  BruteGospa best;
  best.total = std::numeric_limits<double>::infinity();
  detail::gospa_rec(truth, est, c, 0, 0u, 0.0, 0, best);
  return best;
}

inline double brute_rmse(const std::vector<double>& truth,
                         const std::vector<double>& est, double cp) {
  double best = std::numeric_limits<double>::infinity();
  detail::rmse_rec(truth, est, cp, 0, 0u, 0.0, 0, best);
  return std::sqrt(best / double(truth.size()));
}

} // namespace oracle
