#include "svalse/valse.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace svalse {

namespace {

std::vector<int> active_of(const std::vector<std::uint8_t>& s) {
  std::vector<int> idx;
  for (int l = 0; l < int(s.size()); ++l)
    if (s[l]) idx.push_back(l);
  return idx;
}

Eigen::MatrixXcd sub_matrix(const Eigen::MatrixXcd& a, const std::vector<int>& idx) {
  Eigen::MatrixXcd out(idx.size(), idx.size());
  for (size_t r = 0; r < idx.size(); ++r)
    for (size_t c = 0; c < idx.size(); ++c) out(r, c) = a(idx[r], idx[c]);
  return out;
}

Eigen::VectorXcd sub_vector(const Eigen::VectorXcd& v, const std::vector<int>& idx) {
  Eigen::VectorXcd out(idx.size());
  for (size_t r = 0; r < idx.size(); ++r) out[r] = v[idx[r]];
  return out;
}

// Cholesky of J_S + (nu/tau) I with a jitter fallback for (near-)singular
// systems arising from duplicate beliefs. The ladder starts at the spec'd
// 1e-10*nu but is floored at the matrix scale so it terminates even when nu
// has collapsed (noiseless data).
Eigen::LLT<Eigen::MatrixXcd> factor_system(Eigen::MatrixXcd a, double nu,
                                           bool* jitter_flag) {
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() == Eigen::Success) return llt;
  const double scale =
      std::max(std::abs(std::real(a.trace())) / double(a.rows()), 1e-300);
  double jitter = std::max(1e-10 * nu, 1e-15 * scale);
  for (int tries = 0; tries < 12 && llt.info() != Eigen::Success; ++tries) {
    a.diagonal().array() += jitter;
    llt.compute(a);
    jitter *= 1e3;
    if (jitter_flag) *jitter_flag = true;
  }
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("valse: active-set system is not positive definite");
  return llt;
}

} // namespace

GramSummary gram(const Eigen::MatrixXcd& a_hats, const Eigen::VectorXcd& y) {
  if (a_hats.rows() != y.size())
    throw std::invalid_argument("gram: steering length mismatch");
  GramSummary g;
  g.j = a_hats.adjoint() * a_hats;
  g.j.diagonal().setConstant(cplx(double(a_hats.rows()), 0.0));
  g.h = a_hats.adjoint() * y;
  return g;
}

void gram_refresh(GramSummary& g, const Eigen::MatrixXcd& a_hats,
                  const Eigen::VectorXcd& y, int l) {
  const Eigen::VectorXcd col = a_hats.adjoint() * a_hats.col(l);
  g.j.col(l) = col;
  g.j.row(l) = col.adjoint();
  g.j(l, l) = cplx(double(a_hats.rows()), 0.0);
  g.h(l) = a_hats.col(l).dot(y);
}

WeightPosterior weight_posterior(const std::vector<std::uint8_t>& s,
                                 const GramSummary& g, double nu, double tau) {
  WeightPosterior wp;
  const std::vector<int> idx = active_of(s);
  if (idx.empty()) return wp;
  Eigen::MatrixXcd a = sub_matrix(g.j, idx);
  a.diagonal().array() += nu / tau;
  const auto llt = factor_system(std::move(a), nu, &wp.jitter);
  const Eigen::VectorXcd h = sub_vector(g.h, idx);
  wp.w = llt.solve(h);
  Eigen::MatrixXcd c =
      nu * llt.solve(Eigen::MatrixXcd::Identity(idx.size(), idx.size()));
  wp.c = 0.5 * (c + c.adjoint()); // enforce exact Hermitian symmetry
  return wp;
}

double support_objective(const std::vector<std::uint8_t>& s, const GramSummary& g,
                         double nu, double tau, const Eigen::VectorXd& rhos,
                         bool* jitter_flag) {
  if (!(nu > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("support_objective: nu and tau must be > 0");
  const std::vector<int> idx = active_of(s);
  if (idx.empty()) return 0.0;

  Eigen::MatrixXcd a = sub_matrix(g.j, idx);
  a.diagonal().array() += nu / tau;
  const auto llt = factor_system(std::move(a), nu, jitter_flag);
  const Eigen::VectorXcd h = sub_vector(g.h, idx);
  const Eigen::VectorXcd w = llt.solve(h);

  double log_det_c = double(idx.size()) * std::log(nu);
  const auto& lmat = llt.matrixLLT();
  for (int i = 0; i < int(idx.size()); ++i)
    log_det_c -= 2.0 * std::log(std::real(lmat(i, i)));

  double val = log_det_c - double(idx.size()) * std::log(tau) +
               std::real(h.dot(w)) / nu;
  for (int l : idx) val += std::log(rhos[l] / (1.0 - rhos[l]));
  return val;
}

SupportObjective support_objective_with_flips(const std::vector<std::uint8_t>& s,
                                              const GramSummary& g, double nu,
                                              double tau,
                                              const Eigen::VectorXd& rhos) {
  SupportObjective out;
  out.value = support_objective(s, g, nu, tau, rhos);
  const int l_count = int(s.size());
  out.flip_value.resize(l_count);
  std::vector<std::uint8_t> flip = s;
  for (int l = 0; l < l_count; ++l) {
    flip[l] = !flip[l];
    out.flip_value[l] = support_objective(flip, g, nu, tau, rhos);
    flip[l] = !flip[l];
  }
  return out;
}

std::vector<std::uint8_t> greedy_support(std::vector<std::uint8_t> s,
                                         const GramSummary& g, double nu,
                                         double tau, const Eigen::VectorXd& rhos,
                                         std::vector<double>* trace,
                                         const std::vector<std::uint8_t>* activatable) {
  constexpr double kImproveTol = 1e-10;
  double current = support_objective(s, g, nu, tau, rhos);
  if (trace) trace->push_back(current);
  const int l_count = int(s.size());
  for (int round = 0; round < (1 << 12); ++round) {
    int best_l = -1;
    double best_val = current + kImproveTol;
    std::vector<std::uint8_t> flip = s;
    for (int l = 0; l < l_count; ++l) {
      if (!s[l] && activatable && !(*activatable)[l]) continue;
      flip[l] = !flip[l];
      const double v = support_objective(flip, g, nu, tau, rhos);
      flip[l] = !flip[l];
      if (v > best_val) { // strict: lowest index wins ties
        best_val = v;
        best_l = l;
      }
    }
    if (best_l < 0) break;
    s[best_l] = !s[best_l];
    current = best_val;
    if (trace) trace->push_back(current);
  }
  return s;
}

std::pair<double, double> estimate_hyper(const Eigen::VectorXcd& y,
                                         const std::vector<std::uint8_t>& s,
                                         const WeightPosterior& wp,
                                         const Eigen::MatrixXcd& a_hats,
                                         const GramSummary& g, double tau_prev,
                                         bool* nu_clamped) {
  const double m = double(y.size());
  const std::vector<int> idx = active_of(s);
  if (idx.empty()) {
    double nu = y.squaredNorm() / m;
    if (nu <= 0.0) nu = 1e-12;
    return {nu, tau_prev};
  }

  Eigen::VectorXcd fit = Eigen::VectorXcd::Zero(y.size());
  double w_energy_defect = 0.0;
  for (size_t k = 0; k < idx.size(); ++k) {
    fit += wp.w[k] * a_hats.col(idx[k]);
    const double a_norm2 = a_hats.col(idx[k]).squaredNorm();
    w_energy_defect += std::norm(wp.w[k]) * (1.0 - a_norm2 / m);
  }
  const Eigen::MatrixXcd j_s = sub_matrix(g.j, idx);
  const double trace_jc = std::real((j_s * wp.c).trace());

  double nu = (y - fit).squaredNorm() / m + trace_jc / m + w_energy_defect;
  // Floor at the numerical noise of the snapshot itself; below it, rounding
  // residue masquerades as signal.
  const double nu_floor = std::max(1e-12 * y.squaredNorm() / m, 1e-300);
  if (nu < nu_floor) {
    nu = nu_floor;
    if (nu_clamped) *nu_clamped = true;
  }
  const double tau =
      (wp.w.squaredNorm() + std::real(wp.c.trace())) / double(idx.size());
  return {nu, tau};
}

namespace {

// Moment matching across well-separated modes of a multimodal angle
// posterior yields an angle between sources. For components refined under a
// predicted prior, restrict the collapse to the cluster around the
// top-weight component when that cluster clearly carries the posterior mass
// (the mixture arrives sorted by weight); remaining modes stay available to
// other components through the residual. Without a prior the mixture is
// collapsed whole, so an ambiguous posterior stays diffuse and its steering
// estimate stays weak.
enum class CollapseMode { kFull, kDominantIfDecisive, kDominantAlways };

VonMises collapse_posterior(const VmMixture& mix, CollapseMode mode) {
  VmMixture all, cluster;
  double total = 0.0, wsum = 0.0;
  for (const VmComponent& c : mix.components) {
    if (c.vm.kappa <= 0.0) continue;
    all.components.push_back(c);
    total += c.weight;
    if (cluster.components.empty()) {
      cluster.components.push_back(c);
      wsum = c.weight;
      continue;
    }
    const double gate = kPi / 15.0 +
                        3.0 / std::sqrt(cluster.components.front().vm.kappa);
    if (std::abs(wrap_angle(c.vm.mu - cluster.components.front().vm.mu)) < gate) {
      cluster.components.push_back(c);
      wsum += c.weight;
    }
  }
  if (all.components.empty()) return VonMises{0.0, 0.0};
  const bool take_cluster =
      mode == CollapseMode::kDominantAlways ||
      (mode == CollapseMode::kDominantIfDecisive && wsum >= 0.6 * total);
  if (take_cluster) {
    VmMixture scaled = cluster;
    for (VmComponent& c : scaled.components) c.weight /= wsum;
    return mixture_collapse(scaled);
  }
  for (VmComponent& c : all.components) c.weight /= total;
  return mixture_collapse(all);
}

} // namespace

VonMises update_theta(int l, const Eigen::VectorXcd& y,
                      const std::vector<std::uint8_t>& s,
                      const Eigen::VectorXcd& w_active,
                      const Eigen::MatrixXcd& c_active,
                      const Eigen::MatrixXcd& a_hats, double nu, cplx prior_eta,
                      int prune_d) {
  const std::vector<int> idx = active_of(s);
  int pos = -1;
  for (size_t k = 0; k < idx.size(); ++k)
    if (idx[k] == l) pos = int(k);
  if (pos < 0) throw std::invalid_argument("update_theta: component not active");

  Eigen::VectorXcd resid = y;
  for (size_t k = 0; k < idx.size(); ++k)
    if (int(k) != pos) resid -= w_active[k] * a_hats.col(idx[k]);

  Eigen::VectorXcd eta = resid * std::conj(w_active[pos]);
  for (size_t k = 0; k < idx.size(); ++k)
    if (int(k) != pos) eta -= c_active(k, pos) * a_hats.col(idx[k]);
  eta *= 2.0 / nu;

  std::vector<WrappedFactor> factors;
  factors.reserve(y.size() - 1);
  for (int m = 1; m < int(y.size()); ++m) factors.push_back({m, eta[m]});

  std::optional<VonMises> prior;
  const bool have_prior = std::abs(prior_eta) > 0.0;
  if (have_prior) prior = VonMises::from_natural(prior_eta);

  return collapse_posterior(product_reduce(prior, factors, prune_d),
                            have_prior ? CollapseMode::kDominantIfDecisive
                                       : CollapseMode::kFull);
}

VonMises belief_from_residual(const Eigen::VectorXcd& z, double nu, int prune_d) {
  const int m_sensors = int(z.size());
  std::vector<WrappedFactor> factors;
  factors.reserve(m_sensors - 1);
  double energy = 0.0;
  for (int u = 1; u < m_sensors; ++u) {
    cplx lag(0.0, 0.0);
    for (int i = 0; i + u < m_sensors; ++i) lag += z[i + u] * std::conj(z[i]);
    const cplx eta = (2.0 / (nu * double(m_sensors))) * lag;
    energy += std::abs(eta);
    factors.push_back({u, eta});
  }
  if (energy == 0.0) return VonMises{0.0, 0.0};
  // Dominant-mode collapse: the peeled surrogate is multimodal whenever the
  // residual holds several sources (symmetric scenes put modes at exact
  // opposites); the slot must commit to one mode and leave the rest to the
  // residual of the next slot.
  return collapse_posterior(product_reduce(std::nullopt, factors, prune_d),
                            CollapseMode::kDominantAlways);
}

InitState init_beliefs(const Eigen::VectorXcd& y, const ArrayGeometry& geom,
                       const EstimatorConfig& cfg) {
  if (y.size() != geom.m_sensors)
    throw std::invalid_argument("init_beliefs: snapshot length mismatch");
  const double m = double(geom.m_sensors);
  const int l_count = cfg.l_components;

  InitState init;
  init.nu0 = y.squaredNorm() / (m * std::pow(10.0, cfg.snr_init_db / 10.0));
  if (init.nu0 <= 0.0) init.nu0 = 1e-12; // all-zero snapshot
  init.tau0 = (y.squaredNorm() / m - init.nu0) / (cfg.rho0 * double(l_count));
  if (init.tau0 <= 0.0) {
    init.tau0 = 1e-3 * init.nu0;
    init.tau_clamped = true;
  }

  init.beliefs.resize(l_count);
  init.a_hats.resize(geom.m_sensors, l_count);
  Eigen::VectorXcd z = y;
  for (int l = 0; l < l_count; ++l) {
    const VonMises b = belief_from_residual(z, init.nu0, cfg.prune_d);
    init.beliefs[l] = ComponentBelief{b, cfg.rho0, false};
    init.a_hats.col(l) = expected_steering(b, geom.m_sensors);

    // Joint weight re-estimate over the components peeled so far, then the
    // residual that seeds the next component.
    const auto block = init.a_hats.leftCols(l + 1);
    Eigen::MatrixXcd a = block.adjoint() * block;
    a.diagonal().setConstant(cplx(m, 0.0));
    a.diagonal().array() += init.nu0 / init.tau0;
    bool jitter = false;
    const auto llt = factor_system(std::move(a), init.nu0, &jitter);
    const Eigen::VectorXcd w = llt.solve(block.adjoint() * y);
    z = y - block * w;
  }
  return init;
}

PosteriorState run_update(const Eigen::VectorXcd& y, const ArrayGeometry& geom,
                          const EstimatorConfig& cfg, const InitState& init,
                          const Eigen::VectorXd& rhos,
                          const Eigen::VectorXcd& prior_etas) {
  cfg.validate();
  const int l_count = cfg.l_components;
  if (int(init.beliefs.size()) != l_count || rhos.size() != l_count ||
      prior_etas.size() != l_count)
    throw std::invalid_argument("run_update: input sizes inconsistent with L");
  if (y.size() != geom.m_sensors)
    throw std::invalid_argument("run_update: snapshot length mismatch");

  PosteriorState st;
  st.beliefs = init.beliefs;
  st.s_hat.assign(l_count, 0);
  st.nu = init.nu0;
  st.tau = init.tau0;
  st.diag.tau_clamped = init.tau_clamped;

  std::vector<std::uint8_t> activatable(l_count, 1);
  for (int l = 0; l < l_count; ++l) {
    activatable[l] = init.beliefs[l].theta.kappa > 0.0 ||
                     std::abs(prior_etas[l]) > 0.0;
    // Components predicted active enter the first support search switched
    // on, so the search continues from the predicted solution.
    if (rhos[l] > 0.5 && activatable[l]) st.s_hat[l] = 1;
  }

  Eigen::MatrixXcd a_hats = init.a_hats;
  GramSummary g = gram(a_hats, y);
  WeightPosterior wp;

  for (int p = 1; p <= cfg.max_iter; ++p) {
    const std::vector<std::uint8_t> s_new =
        greedy_support(st.s_hat, g, st.nu, st.tau, rhos, nullptr, &activatable);
    const bool s_changed = (s_new != st.s_hat);
    st.s_hat = s_new;
    for (int l = 0; l < l_count; ++l)
      if (st.s_hat[l]) st.beliefs[l].was_active_any_iter = true;

    wp = weight_posterior(st.s_hat, g, st.nu, st.tau);
    st.diag.jitter_applied = st.diag.jitter_applied || wp.jitter;

    bool nu_clamped = false;
    std::tie(st.nu, st.tau) =
        estimate_hyper(y, st.s_hat, wp, a_hats, g, st.tau, &nu_clamped);
    st.diag.nu_clamped = st.diag.nu_clamped || nu_clamped;
    // Amplitude-variance floor: components fitting pure noise must not drag
    // the activation scale to the noise floor within one step.
    st.tau = std::max(st.tau, 0.5 * init.tau0);

    double max_dmu = 0.0;
    for (int l = 0; l < l_count; ++l) {
      if (!st.s_hat[l]) continue;
      const VonMises nb = update_theta(l, y, st.s_hat, wp.w, wp.c, a_hats,
                                       st.nu, prior_etas[l], cfg.prune_d);
      max_dmu = std::max(max_dmu,
                         std::abs(wrap_angle(nb.mu - st.beliefs[l].theta.mu)));
      st.beliefs[l].theta = nb;
      a_hats.col(l) = expected_steering(nb, geom.m_sensors);
      gram_refresh(g, a_hats, y, l);
    }

    // Two active components within a quarter beamwidth are splitting one
    // source; deactivate the later one so its share returns to the residual
    // and the survivor re-centers on the next sweep.
    bool deduped = false;
    for (int i = 0; i < l_count; ++i) {
      if (!st.s_hat[i]) continue;
      for (int j = i + 1; j < l_count; ++j) {
        if (!st.s_hat[j]) continue;
        if (std::abs(wrap_angle(st.beliefs[i].theta.mu - st.beliefs[j].theta.mu)) <
            kPi / (2.0 * double(geom.m_sensors))) {
          st.s_hat[j] = 0;
          deduped = true;
        }
      }
    }

    for (int l = 0; l < l_count; ++l) st.beliefs[l].active_prob = rhos[l];
    if (!s_changed && !deduped && max_dmu < cfg.theta_tol) break;
  }

  // A dedupe on the final (budget-exhausted) iteration leaves the cached
  // weight posterior covering the pre-dedupe support.
  if (int(wp.w.size()) != int(st.active_indices().size()))
    wp = weight_posterior(st.s_hat, g, st.nu, st.tau);
  st.w_hat = wp.w;
  st.c_hat = wp.c;
  st.diag.tau_from_sources =
      init.tau_from_sources || !st.active_indices().empty();
  return st;
}

double mmse_angle(const VonMises& vm) {
  if (vm.kappa <= 0.0)
    throw std::domain_error("mmse_angle: undefined for the uniform belief");
  return vm.mu;
}

} // namespace svalse
