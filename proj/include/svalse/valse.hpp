// Single-time-step variational update engine: initialization, weight/support
// posterior, angle-belief refinement, hyperparameter re-estimation, and the
// iterate-until-converged loop.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "svalse/model.hpp"

namespace svalse {

/// Inner products of expected steering vectors with each other and with the
/// snapshot. Diagonal entries equal M since E[a^H a] = M for any belief.
struct GramSummary {
  Eigen::MatrixXcd j; // L x L, Hermitian, j(l,l) = M
  Eigen::VectorXcd h; // length L, h(l) = a_hat_l^H y
};

GramSummary gram(const Eigen::MatrixXcd& a_hats, const Eigen::VectorXcd& y);

/// Refreshes row/column l of J and entry l of h after a_hat_l changed.
void gram_refresh(GramSummary& g, const Eigen::MatrixXcd& a_hats,
                  const Eigen::VectorXcd& y, int l);

/// ELBO restriction O(s) up to s-independent constants; O(empty) = 0.
/// `jitter_flag`, when given, is set if the active-set system needed diagonal
/// regularization.
double support_objective(const std::vector<std::uint8_t>& s, const GramSummary& g,
                         double nu, double tau, const Eigen::VectorXd& rhos,
                         bool* jitter_flag = nullptr);

/// O at the given support plus O at each of its single-element flips.
struct SupportObjective {
  double value = 0.0;
  Eigen::VectorXd flip_value; // length L
};

SupportObjective support_objective_with_flips(const std::vector<std::uint8_t>& s,
                                              const GramSummary& g, double nu,
                                              double tau,
                                              const Eigen::VectorXd& rhos);

/// Greedy single-flip ascent of O from `s_start`; applies the best strictly
/// improving flip (threshold 1e-10, lowest index wins ties) until none
/// remains. When `trace` is given, the O value after each accepted flip is
/// appended (starting with O(s_start)). Slots marked 0 in `activatable`
/// (when given) may be deactivated but never switched on; an uninformative
/// belief is not a source hypothesis.
std::vector<std::uint8_t> greedy_support(
    std::vector<std::uint8_t> s_start, const GramSummary& g, double nu,
    double tau, const Eigen::VectorXd& rhos, std::vector<double>* trace = nullptr,
    const std::vector<std::uint8_t>* activatable = nullptr);

struct WeightPosterior {
  Eigen::VectorXcd w; // over active set, ascending index order
  Eigen::MatrixXcd c;
  bool jitter = false;
};

/// C_S = nu (J_S + (nu/tau) I)^{-1}, w_S = C_S h_S / nu.
WeightPosterior weight_posterior(const std::vector<std::uint8_t>& s,
                                 const GramSummary& g, double nu, double tau);

/// Noise/amplitude variance re-estimation. tau is left at `tau_prev` when the
/// active set is empty. `nu_clamped` reports the non-positive-estimate guard.
std::pair<double, double> estimate_hyper(const Eigen::VectorXcd& y,
                                         const std::vector<std::uint8_t>& s,
                                         const WeightPosterior& wp,
                                         const Eigen::MatrixXcd& a_hats,
                                         const GramSummary& g, double tau_prev,
                                         bool* nu_clamped = nullptr);

/// Refined angle belief for active component l: exponent built from the
/// residual and covariance corrections, multiplied into the optional prior
/// through the wrapped-factor machinery, pruned to `prune_d`, and collapsed.
VonMises update_theta(int l, const Eigen::VectorXcd& y,
                      const std::vector<std::uint8_t>& s,
                      const Eigen::VectorXcd& w_active,
                      const Eigen::MatrixXcd& c_active,
                      const Eigen::MatrixXcd& a_hats, double nu, cplx prior_eta,
                      int prune_d);

/// Initialization products for one snapshot.
struct InitState {
  std::vector<ComponentBelief> beliefs;
  Eigen::MatrixXcd a_hats; // M x L
  double nu0 = 0.0;
  double tau0 = 0.0;
  bool tau_clamped = false;
  bool tau_from_sources = false; // tau0 continues a fitted-source scale
};

/// Sequential residual-based initialization: noise floor from the configured
/// init SNR, amplitude variance from the power-budget identity, and component
/// beliefs peeled one at a time from lag-product surrogates of the residual.
InitState init_beliefs(const Eigen::VectorXcd& y, const ArrayGeometry& geom,
                       const EstimatorConfig& cfg);

/// Builds a single angle belief from the lag products of `z` (uniform belief
/// when z carries no structure). Exposed for the sequential initializer and
/// the cross-step information transfer.
VonMises belief_from_residual(const Eigen::VectorXcd& z, double nu, int prune_d);

/// Full coordinate-ascent loop for one snapshot. `prior_etas(l)` is the
/// natural parameter of the predicted prior for component l (zero when the
/// slot has no prior). Deterministic in all inputs.
PosteriorState run_update(const Eigen::VectorXcd& y, const ArrayGeometry& geom,
                          const EstimatorConfig& cfg, const InitState& init,
                          const Eigen::VectorXd& rhos,
                          const Eigen::VectorXcd& prior_etas);

/// MMSE angle estimate of a von Mises belief (its mean direction).
/// Throws std::domain_error for the uniform belief.
double mmse_angle(const VonMises& vm);

} // namespace svalse
