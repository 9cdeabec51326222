#include "svalse/circular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svalse {

double wrap_angle(double x) {
  double r = std::remainder(x, kTwoPi); // [-pi, pi]
  if (r >= kPi) r -= kTwoPi;
  return r;
}

VonMises VonMises::from_natural(cplx eta) {
  double kappa = std::abs(eta);
  if (kappa == 0.0) return VonMises{0.0, 0.0};
  return VonMises{wrap_angle(std::arg(eta)), kappa};
}

VonMises vm_multiply(const VonMises& a, const VonMises& b) {
  return VonMises::from_natural(a.natural() + b.natural());
}

namespace {

// Scaled asymptotic series S_m(x) with I_m(x) ~ e^x / sqrt(2 pi x) * S_m(x).
// Returns false when the series fails to reach the requested accuracy before
// its terms start diverging.
bool asymptotic_scaled(int m, double x, double* out) {
  const double mu4 = 4.0 * double(m) * double(m);
  double term = 1.0, sum = 1.0;
  double prev_mag = std::abs(term);
  for (int k = 1; k <= 60; ++k) {
    const double num = mu4 - double(2 * k - 1) * double(2 * k - 1);
    term *= -num / (8.0 * x * double(k));
    sum += term;
    const double mag = std::abs(term);
    if (mag <= 1e-17 * std::abs(sum)) {
      *out = sum;
      return true;
    }
    if (mag > prev_mag) return false; // diverging before convergence
    prev_mag = mag;
  }
  return false;
}

// Power-series ratio I_m(x)/I_0(x), reliable for x <= ~40.
double series_ratio(int m, double x) {
  const double q = 0.25 * x * x;
  // I_m(x) = (x/2)^m / m! * sum_k q^k / (k! (m+1)..(m+k))
  double lead = std::exp(double(m) * std::log(0.5 * x) - std::lgamma(double(m) + 1.0));
  double sm = 1.0, tm = 1.0;
  double s0 = 1.0, t0 = 1.0;
  for (int k = 1; k <= 200; ++k) {
    tm *= q / (double(k) * double(m + k));
    t0 *= q / (double(k) * double(k));
    sm += tm;
    s0 += t0;
    if (tm <= 1e-18 * sm && t0 <= 1e-18 * s0) break;
  }
  return lead * sm / s0;
}

// Miller backward recurrence, returning scaled values proportional to
// I_0..I_mmax. Overflow-free by periodic rescaling.
void miller_scaled(int mmax, double x, Eigen::VectorXd& out) {
  const int start =
      mmax + int(std::ceil(8.7 * std::sqrt(std::max(x, 1.0)))) + 20;
  out.setZero(mmax + 1);
  double fp = 0.0;     // f_{k+1}
  double fc = 1e-280;  // f_k at k = start
  for (int k = start; k >= 1; --k) {
    const double fm = fp + (2.0 * double(k) / x) * fc; // f_{k-1}
    fp = fc;
    fc = fm;
    if (k - 1 <= mmax) out[k - 1] = fc;
    if (std::abs(fc) > 1e250) {
      fp *= 1e-250;
      fc *= 1e-250;
      out *= 1e-250;
    }
  }
}

} // namespace

Eigen::VectorXd bessel_ratios_upto(int mmax, double kappa) {
  if (mmax < 0) throw std::invalid_argument("bessel_ratios_upto: mmax < 0");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("bessel_ratios_upto: kappa must be finite and >= 0");
  Eigen::VectorXd r(mmax + 1);
  r[0] = 1.0;
  if (mmax == 0) return r;
  if (kappa == 0.0) {
    r.tail(mmax).setZero();
    return r;
  }
  if (kappa < 1e-100) {
    // Leading-order limit; relative error O(kappa^2).
    for (int m = 1; m <= mmax; ++m) {
      r[m] = std::exp(double(m) * std::log(0.5 * kappa) -
                      std::lgamma(double(m) + 1.0));
    }
    return r;
  }
  // The scaled asymptotic series self-detects divergence, so it is usable
  // well below the classical large-argument regime; prefer it whenever it is
  // cheaper than the backward recurrence.
  const bool prefer_asym =
      kappa > 42.0 && (kappa > 1e4 || 25.0 * double(mmax + 2) <
                                          8.7 * std::sqrt(kappa) + 80.0);
  if (prefer_asym) {
    double s0 = 0.0;
    if (asymptotic_scaled(0, kappa, &s0)) {
      bool ok = true;
      for (int m = 1; m <= mmax; ++m) {
        double sm = 0.0;
        if (!asymptotic_scaled(m, kappa, &sm)) {
          ok = false;
          break;
        }
        r[m] = sm / s0;
      }
      if (ok) return r;
    }
  }
  if (kappa <= 40.0 && mmax <= 60) {
    for (int m = 1; m <= mmax; ++m) r[m] = series_ratio(m, kappa);
    return r;
  }
  Eigen::VectorXd f;
  miller_scaled(mmax, kappa, f);
  for (int m = 1; m <= mmax; ++m) r[m] = f[m] / f[0];
  return r;
}

double bessel_ratio(int m, double kappa) {
  if (m < 0) throw std::invalid_argument("bessel_ratio: m < 0");
  if (m == 0) return 1.0;
  return bessel_ratios_upto(m, kappa)[m];
}

double log_i0(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("log_i0: x must be >= 0");
  if (x <= 40.0) {
    const double q = 0.25 * x * x;
    double sum = 1.0, term = 1.0;
    for (int k = 1; k <= 200; ++k) {
      term *= q / (double(k) * double(k));
      sum += term;
      if (term <= 1e-18 * sum) break;
    }
    return std::log(sum);
  }
  double s0 = 0.0;
  if (!asymptotic_scaled(0, x, &s0)) s0 = 1.0; // unreachable for x > 40
  return x - 0.5 * std::log(kTwoPi * x) + std::log(s0);
}

double vm_log_pdf(const VonMises& vm, double theta) {
  return vm.kappa * std::cos(theta - vm.mu) - std::log(kTwoPi) - log_i0(vm.kappa);
}

cplx vm_char(const VonMises& vm, int m) {
  if (m < 0) throw std::invalid_argument("vm_char: m < 0");
  if (m == 0) return cplx(1.0, 0.0);
  if (vm.kappa == 0.0) return cplx(0.0, 0.0);
  return std::polar(bessel_ratio(m, vm.kappa), double(m) * vm.mu);
}

double invert_ratio(int m, double target) {
  if (m < 1) throw std::invalid_argument("invert_ratio: m must be >= 1");
  if (!(target < 1.0)) throw std::domain_error("invert_ratio: target must be < 1");
  if (target <= 0.0) return 0.0;

  // Ratio and derivative d/dk [I_m/I_0] = (R_{m-1}+R_{m+1})/2 - R_m R_1.
  // In the large-argument regime only the four needed orders are evaluated,
  // sharing the order-0 series.
  auto eval = [&](double k, double* dval) {
    if (k > 300.0) {
      double s0, s1, sm1, sm, sp1;
      if (asymptotic_scaled(0, k, &s0) && asymptotic_scaled(1, k, &s1) &&
          asymptotic_scaled(m - 1, k, &sm1) && asymptotic_scaled(m, k, &sm) &&
          asymptotic_scaled(m + 1, k, &sp1)) {
        const double rm = sm / s0;
        if (dval) *dval = 0.5 * (sm1 + sp1) / s0 - rm * s1 / s0;
        return rm;
      }
    }
    Eigen::VectorXd r = bessel_ratios_upto(m + 1, k);
    if (dval) *dval = 0.5 * (r[m - 1] + r[m + 1]) - r[m] * r[1];
    return r[m];
  };

  // Initial guess from the two tail regimes of the ratio: a second-order
  // large-kappa expansion R_m ~ 1 - A u + A(A-8) u^2 / 2 in u = 1/(8 kappa)
  // with A = 4 m^2, or the small-kappa leading term.
  double guess;
  if (target > 0.6) {
    const double a = 4.0 * double(m) * double(m);
    const double disc = a * a - 2.0 * a * (a - 8.0) * (1.0 - target);
    if (a != 8.0 && disc > 0.0) {
      const double u = (a - std::sqrt(disc)) / (a * (a - 8.0));
      guess = (u > 0.0) ? 1.0 / (8.0 * u)
                        : double(m) * double(m) / (2.0 * (1.0 - target));
    } else {
      guess = double(m) * double(m) / (2.0 * (1.0 - target));
    }
  } else {
    guess = 2.0 * std::exp((std::log(target) + std::lgamma(double(m) + 1.0)) /
                           double(m));
  }
  guess = std::clamp(guess, 1e-8, kKappaCap);

  double lo = 0.0;
  double hi = guess;
  while (eval(hi, nullptr) < target) {
    lo = hi;
    hi = std::min(hi * 8.0, kKappaCap);
    if (hi == kKappaCap) {
      if (eval(hi, nullptr) < target) return kKappaCap; // point-mass regime
      break;
    }
  }

  const double nudge = 1e-6 * (hi - lo);
  double x = std::clamp(guess, lo + nudge, hi - nudge);
  for (int it = 0; it < 100; ++it) {
    double d = 0.0;
    const double v = eval(x, &d) - target;
    if (v > 0.0)
      hi = x;
    else
      lo = x;
    double xn = (d > 0.0) ? x - v / d : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    const double dx = std::abs(xn - x);
    x = xn;
    if (dx <= 1e-11 * std::max(1.0, x)) break;
  }
  return x;
}

VmMixture unwrap_mixture(const WrappedFactor& f) {
  if (f.order < 1) throw std::invalid_argument("unwrap_mixture: order must be >= 1");
  // Point-mass cap: beyond it the matched ratio rounds to 1 in double.
  const double kappa_m = std::min(std::abs(f.eta), kKappaCap);
  const double mu_m = (kappa_m > 0.0) ? std::arg(f.eta) : 0.0;
  VmMixture mix;
  if (f.order == 1) {
    mix.components.push_back({1.0, VonMises{wrap_angle(mu_m), kappa_m}});
    return mix;
  }
  const double target = bessel_ratio(1, kappa_m);
  const double kt = invert_ratio(f.order, target);
  const double w = 1.0 / double(f.order);
  mix.components.reserve(f.order);
  for (int r = 1; r <= f.order; ++r) {
    const double mu = (mu_m + kTwoPi * double(r - 1)) / double(f.order);
    mix.components.push_back({w, VonMises{wrap_angle(mu), kt}});
  }
  return mix;
}

VmMixture product_reduce(const std::optional<VonMises>& prior,
                         std::span<const WrappedFactor> factors, int prune_d) {
  if (prune_d < 1) throw std::invalid_argument("product_reduce: prune_d must be >= 1");
  if (!prior.has_value() && factors.empty())
    throw std::domain_error("product_reduce: no prior and no factors");

  struct Cand {
    cplx zeta;
    double logw;
  };
  std::vector<Cand> cur;
  cur.push_back({prior.has_value() ? prior->natural() : cplx(0.0, 0.0), 0.0});

  int prev_order = 0;
  std::vector<Cand> nxt;
  for (const WrappedFactor& f : factors) {
    if (f.order <= prev_order)
      throw std::invalid_argument("product_reduce: factors must have ascending order");
    prev_order = f.order;
    const VmMixture uf = unwrap_mixture(f);
    if (uf.components.front().vm.kappa == 0.0) continue; // uniform factor, no-op

    nxt.clear();
    nxt.reserve(cur.size() * uf.components.size());
    for (const Cand& c : cur) {
      for (const VmComponent& comp : uf.components) {
        const cplx zeta = c.zeta + comp.vm.natural();
        nxt.push_back({zeta, log_i0(std::abs(zeta))});
      }
    }
    if (int(nxt.size()) > prune_d) {
      std::stable_sort(nxt.begin(), nxt.end(),
                       [](const Cand& a, const Cand& b) { return a.logw > b.logw; });
      nxt.resize(prune_d);
    }
    std::swap(cur, nxt);
  }

  // Weights proportional to I_0(|zeta|), normalized in the log domain.
  for (Cand& c : cur) c.logw = log_i0(std::abs(c.zeta));
  std::stable_sort(cur.begin(), cur.end(),
                   [](const Cand& a, const Cand& b) { return a.logw > b.logw; });
  const double lmax = cur.front().logw;
  double z = 0.0;
  for (const Cand& c : cur) z += std::exp(c.logw - lmax);
  VmMixture mix;
  mix.components.reserve(cur.size());
  for (const Cand& c : cur) {
    mix.components.push_back(
        {std::exp(c.logw - lmax) / z, VonMises::from_natural(c.zeta)});
  }
  return mix;
}

double circular_mean(const VmMixture& mix) {
  if (mix.components.empty())
    throw std::invalid_argument("circular_mean: empty mixture");
  cplx resultant(0.0, 0.0);
  for (const VmComponent& c : mix.components) {
    resultant += c.weight * vm_char(c.vm, 1);
  }
  return wrap_angle(std::arg(resultant));
}

VonMises mixture_collapse(const VmMixture& mix) {
  if (mix.components.empty())
    throw std::invalid_argument("mixture_collapse: empty mixture");
  for (const VmComponent& c : mix.components) {
    if (c.vm.kappa == 0.0)
      throw std::domain_error("mixture_collapse: component with kappa == 0");
  }
  if (mix.components.size() == 1) return mix.components.front().vm;

  // Rotate means into the frame of the mixture mean so that moment matching
  // never straddles the -pi/pi seam.
  const double phi = circular_mean(mix);
  double mean = 0.0, second = 0.0;
  for (const VmComponent& c : mix.components) {
    const double d = wrap_angle(c.vm.mu - phi);
    mean += c.weight * d;
    second += c.weight * (1.0 / c.vm.kappa + d * d);
  }
  const double var = second - mean * mean;
  return VonMises{wrap_angle(phi + mean), 1.0 / var};
}

} // namespace svalse
