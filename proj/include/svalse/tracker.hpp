// Sequential layer: Bernoulli-von Mises prediction, cross-step information
// transfer, and the per-step estimation loop with prior injection.
#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "svalse/valse.hpp"

namespace svalse {

/// Von Mises random-walk plus Bernoulli activation transition.
struct TransitionModel {
  double kappa_r = 148.0;
  double p_act = 0.10;
  double p_deact = 0.25;
};

/// Predicted angle belief: same mean, concentrations combine harmonically.
VonMises predict_theta(const VonMises& prev, const TransitionModel& tm);

/// q(s_t = 1 | y_-): 1 - p_deact when previously active, p_act otherwise.
double predict_activation(bool s_prev, const TransitionModel& tm);

/// Inputs for the next step's update, assembled from the previous posterior.
struct TransferResult {
  InitState init;             // predicted + re-initialized beliefs (length L)
  Eigen::VectorXd rhos;       // predicted activation probabilities
  Eigen::VectorXcd prior_etas; // zero for re-initialized slots
  int n_propagated = 0;
};

/// Propagates components that ended active or carry an activation-history
/// flag (lowest slots first), re-initializes the remaining slots from the
/// residual of the new snapshot after removing the propagated components'
/// expected contributions.
TransferResult transfer(const PosteriorState& prev, const Eigen::VectorXcd& y_next,
                        const ArrayGeometry& geom, const EstimatorConfig& cfg);

/// One output row per active component per time step.
struct TrackRecord {
  int t = 0;
  int component_id = 0;
  double doa_deg = 0.0;
  double pa_rad = 0.0;
  double kappa = 0.0;
  cplx weight{0.0, 0.0};
  bool active = true;
};

/// One sequential step: pure update at t = 1 (rho = rho0, no priors),
/// otherwise transfer followed by update with predicted priors.
std::pair<PosteriorState, std::vector<TrackRecord>> svalse_step(
    const std::optional<PosteriorState>& prev, const Snapshot& snap,
    const ArrayGeometry& geom, const EstimatorConfig& cfg);

/// Folds svalse_step over the snapshot sequence. With sequential = false each
/// snapshot is processed independently (the nonsequential baseline).
std::vector<TrackRecord> run_sequence(std::span<const Snapshot> snapshots,
                                      const ArrayGeometry& geom,
                                      const EstimatorConfig& cfg,
                                      bool sequential = true);

} // namespace svalse
