// Von Mises numerics: natural-parameter algebra, Bessel-ratio evaluation and
// inversion, wrapped-factor mixture approximation, pruned products, and
// moment-matched collapse to a single von Mises.
#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace svalse {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Concentrations at or above this are treated as a circular point mass.
inline constexpr double kKappaCap = 1e7;

/// Maps an angle to the canonical interval [-pi, pi).
double wrap_angle(double x);

/// Circular density with mean direction `mu` and concentration `kappa`.
/// kappa == 0 denotes the uniform density on the circle.
struct VonMises {
  double mu = 0.0;
  double kappa = 0.0;

  cplx natural() const { return std::polar(kappa, mu); }
  bool is_uniform() const { return kappa == 0.0; }

  static VonMises from_natural(cplx eta);
};

/// One factor f_VM(m*theta; eta) of an angle posterior, multimodal with
/// `order` modes on the circle.
struct WrappedFactor {
  int order = 1;      // >= 1; the order-0 factor is a constant and never built
  cplx eta{0.0, 0.0}; // kappa_m = |eta|, mu_m = arg(eta)
};

struct VmComponent {
  double weight = 1.0;
  VonMises vm;
};

/// Normalized finite mixture of von Mises components.
struct VmMixture {
  std::vector<VmComponent> components;
};

/// Product of two von Mises densities: natural parameters add exactly.
VonMises vm_multiply(const VonMises& a, const VonMises& b);

/// Characteristic function E[e^{j m theta}] = (I_m(k)/I_0(k)) e^{j m mu}.
cplx vm_char(const VonMises& vm, int m);

/// Modified Bessel ratio I_m(kappa)/I_0(kappa) in [0, 1]; overflow-free for
/// kappa up to kKappaCap and beyond (scaled recurrence / asymptotic series).
double bessel_ratio(int m, double kappa);

/// All ratios I_0..I_mmax over I_0 in one pass.
Eigen::VectorXd bessel_ratios_upto(int mmax, double kappa);

/// log I_0(kappa), overflow-free.
double log_i0(double kappa);

/// log of the von Mises density at `theta`.
double vm_log_pdf(const VonMises& vm, double theta);

/// Solves I_m(k)/I_0(k) = target for k; monotone bracketing plus safeguarded
/// Newton polish. Result is capped at kKappaCap (point-mass regime).
/// Throws std::domain_error for target >= 1.
double invert_ratio(int m, double target);

/// Approximates the m-fold wrapped factor by an m-component equally weighted
/// von Mises mixture with a shared concentration and rotated means.
VmMixture unwrap_mixture(const WrappedFactor& f);

/// Multiplies the (optional) prior and the unwrapped factors incrementally,
/// keeping at most `prune_d` highest-weight components after each stage.
/// Factors must be ordered by ascending order m. Weights after each stage are
/// proportional to I_0(|zeta|) of the accumulated natural parameter.
/// Throws std::domain_error when both the prior is absent and `factors` is
/// empty.
VmMixture product_reduce(const std::optional<VonMises>& prior,
                         std::span<const WrappedFactor> factors, int prune_d);

/// Mean direction of the mixture, arg E[e^{j theta}].
double circular_mean(const VmMixture& mix);

/// Moment-matched single von Mises for a mixture of concentrated components.
/// Components are rotated into the frame of the mixture mean before matching
/// so that the result is seam-safe. Throws std::domain_error when any
/// component has kappa == 0.
VonMises mixture_collapse(const VmMixture& mix);

} // namespace svalse
