#include "svalse/tracker.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace svalse {

VonMises predict_theta(const VonMises& prev, const TransitionModel& tm) {
  if (!(prev.kappa > 0.0))
    throw std::domain_error("predict_theta: previous belief must be informative");
  if (!(tm.kappa_r > 0.0))
    throw std::invalid_argument("predict_theta: kappa_r must be > 0");
  const double kappa = 1.0 / (1.0 / tm.kappa_r + 1.0 / prev.kappa);
  return VonMises{prev.mu, kappa};
}

double predict_activation(bool s_prev, const TransitionModel& tm) {
  return s_prev ? 1.0 - tm.p_deact : tm.p_act;
}

TransferResult transfer(const PosteriorState& prev, const Eigen::VectorXcd& y_next,
                        const ArrayGeometry& geom, const EstimatorConfig& cfg) {
  const int l_count = cfg.l_components;
  const int m_sensors = geom.m_sensors;
  if (int(prev.beliefs.size()) != l_count)
    throw std::invalid_argument("transfer: previous state has wrong component count");
  if (y_next.size() != m_sensors)
    throw std::invalid_argument("transfer: snapshot length mismatch");
  const TransitionModel tm{cfg.kappa_r, cfg.p_act, cfg.p_deact};

  TransferResult tr;
  tr.init.beliefs.resize(l_count);
  tr.init.a_hats.resize(m_sensors, l_count);
  tr.rhos.resize(l_count);
  tr.prior_etas = Eigen::VectorXcd::Zero(l_count);

  bool any_propagated = false;
  for (int l = 0; l < l_count; ++l)
    any_propagated = any_propagated || prev.s_hat[l] != 0 ||
                     prev.beliefs[l].was_active_any_iter;

  // The noise floor restarts from the optimistic per-snapshot rule, which
  // anneals each step's support search out of stale configurations. The
  // amplitude variance continues from the previous posterior whenever that
  // value traces back to fitted sources, so the activation scale stays tied
  // to real source power even across stretches with no active source.
  const double m = double(m_sensors);
  tr.init.nu0 = std::max(
      y_next.squaredNorm() / (m * std::pow(10.0, cfg.snr_init_db / 10.0)),
      1e-12);
  const bool carry_tau = any_propagated || prev.diag.tau_from_sources;
  tr.init.tau0 = carry_tau ? prev.tau
                           : (y_next.squaredNorm() / m - tr.init.nu0) /
                                 (cfg.rho0 * double(l_count));
  tr.init.tau_from_sources = carry_tau;
  if (tr.init.tau0 <= 0.0) {
    tr.init.tau0 = 1e-3 * tr.init.nu0;
    tr.init.tau_clamped = true;
  }

  // Components that ended active or were active at any iteration are
  // propagated into the lowest slots: ending-active ones first, then
  // history-only ones. Candidates within half a beamwidth of an already
  // accepted one describe the same source and are dropped.
  const double dedupe_tol = kPi / m;
  std::vector<double> accepted_mu;
  int slot = 0;
  auto propagate = [&](int l, bool ended_active) {
    const VonMises predicted = predict_theta(prev.beliefs[l].theta, tm);
    for (double mu : accepted_mu)
      if (std::abs(wrap_angle(predicted.mu - mu)) < dedupe_tol) return;
    accepted_mu.push_back(predicted.mu);
    tr.init.beliefs[slot] = ComponentBelief{predicted,
                                            predict_activation(ended_active, tm),
                                            false};
    tr.rhos[slot] = tr.init.beliefs[slot].active_prob;
    tr.prior_etas[slot] = predicted.natural();
    tr.init.a_hats.col(slot) = expected_steering(predicted, m_sensors);
    ++slot;
  };
  for (int l = 0; l < l_count; ++l)
    if (prev.s_hat[l]) propagate(l, true);
  for (int l = 0; l < l_count; ++l)
    if (!prev.s_hat[l] && prev.beliefs[l].was_active_any_iter) propagate(l, false);
  tr.n_propagated = slot;

  // Remaining slots follow the residual-based scheme, subtracting the
  // propagated components' (and previously re-initialized components')
  // estimated contributions.
  Eigen::VectorXcd z = y_next;
  if (slot > 0) {
    const auto block = tr.init.a_hats.leftCols(slot);
    Eigen::MatrixXcd a = block.adjoint() * block;
    a.diagonal().setConstant(cplx(m, 0.0));
    a.diagonal().array() += tr.init.nu0 / tr.init.tau0;
    Eigen::LLT<Eigen::MatrixXcd> llt(a);
    if (llt.info() == Eigen::Success) {
      z = y_next - block * llt.solve(block.adjoint() * y_next);
    }
  }
  Eigen::MatrixXcd peel = tr.init.a_hats.leftCols(slot);
  for (int l = slot; l < l_count; ++l) {
    const VonMises b = belief_from_residual(z, tr.init.nu0, cfg.prune_d);

    // A re-initialized slot landing on a propagated track would split that
    // source into a bracketing pair; leave such slots uninformative and let
    // the propagated component claim the residual during the update. The
    // peeled energy is still removed so deeper sources surface.
    bool shadowed = false;
    for (double mu : accepted_mu)
      shadowed = shadowed ||
                 (b.kappa > 0.0 && std::abs(wrap_angle(b.mu - mu)) < dedupe_tol);

    const VonMises stored = shadowed ? VonMises{0.0, 0.0} : b;
    tr.init.beliefs[l] = ComponentBelief{stored, predict_activation(false, tm), false};
    tr.rhos[l] = tr.init.beliefs[l].active_prob;
    tr.init.a_hats.col(l) = expected_steering(stored, m_sensors);

    peel.conservativeResize(Eigen::NoChange, peel.cols() + 1);
    peel.col(peel.cols() - 1) = expected_steering(b, m_sensors);
    Eigen::MatrixXcd a = peel.adjoint() * peel;
    a.diagonal().setConstant(cplx(m, 0.0));
    a.diagonal().array() += tr.init.nu0 / tr.init.tau0;
    Eigen::LLT<Eigen::MatrixXcd> llt(a);
    if (llt.info() != Eigen::Success) continue;
    z = y_next - peel * llt.solve(peel.adjoint() * y_next);
  }
  return tr;
}

namespace {

std::vector<TrackRecord> records_of(const PosteriorState& st, int t,
                                    const ArrayGeometry& geom) {
  std::vector<TrackRecord> recs;
  const std::vector<int> idx = st.active_indices();
  for (size_t k = 0; k < idx.size(); ++k) {
    const int l = idx[k];
    const double pa = mmse_angle(st.beliefs[l].theta);
    TrackRecord r;
    r.t = t;
    r.component_id = l;
    r.pa_rad = pa;
    r.doa_deg = pa_to_doa(geom, pa);
    r.kappa = st.beliefs[l].theta.kappa;
    r.weight = st.w_hat[k];
    r.active = true;
    recs.push_back(r);
  }
  return recs;
}

} // namespace

std::pair<PosteriorState, std::vector<TrackRecord>> svalse_step(
    const std::optional<PosteriorState>& prev, const Snapshot& snap,
    const ArrayGeometry& geom, const EstimatorConfig& cfg) {
  cfg.validate();
  PosteriorState st;
  if (!prev.has_value()) {
    const InitState init = init_beliefs(snap.y, geom, cfg);
    const Eigen::VectorXd rhos =
        Eigen::VectorXd::Constant(cfg.l_components, cfg.rho0);
    const Eigen::VectorXcd priors = Eigen::VectorXcd::Zero(cfg.l_components);
    st = run_update(snap.y, geom, cfg, init, rhos, priors);
  } else {
    const TransferResult tr = transfer(*prev, snap.y, geom, cfg);
    st = run_update(snap.y, geom, cfg, tr.init, tr.rhos, tr.prior_etas);
  }
  return {st, records_of(st, snap.t, geom)};
}

std::vector<TrackRecord> run_sequence(std::span<const Snapshot> snapshots,
                                      const ArrayGeometry& geom,
                                      const EstimatorConfig& cfg,
                                      bool sequential) {
  if (snapshots.empty())
    throw std::domain_error("run_sequence: empty snapshot list");
  for (const Snapshot& s : snapshots) {
    if (s.y.size() != geom.m_sensors)
      throw std::domain_error("run_sequence: snapshot length inconsistent with geometry");
  }
  std::vector<TrackRecord> all;
  std::optional<PosteriorState> state;
  for (const Snapshot& s : snapshots) {
    auto [st, recs] = svalse_step(sequential ? state : std::nullopt, s, geom, cfg);
    if (sequential) state = std::move(st);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return all;
}

} // namespace svalse
