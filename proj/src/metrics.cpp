#include "svalse/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace svalse {

std::vector<std::pair<int, int>> assign(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols())
    throw std::invalid_argument("assign: cost matrix must be square");
  const int n = int(cost.rows());
  if (n == 0) return {};
  if (!cost.allFinite())
    throw std::invalid_argument("assign: cost matrix must be finite");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::pair<int, int>> pairs(n);
  for (int j = 1; j <= n; ++j) pairs[p[j] - 1] = {p[j] - 1, j - 1};
  return pairs;
}

namespace {

// Square (K + Khat) matrix: real pairs in the top-left block, one dummy per
// element at `penalty` on its own diagonal, dummy-dummy free. A large finite
// sentinel keeps impossible pairings out of any optimal matching.
Eigen::MatrixXd padded_cost(const std::vector<double>& truth,
                            const std::vector<double>& est, double penalty,
                            bool squared) {
  const int k = int(truth.size());
  const int khat = int(est.size());
  const int n = k + khat;
  double dmax = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < khat; ++j) {
      double d = std::abs(truth[i] - est[j]);
      if (squared) d *= d;
      dmax = std::max(dmax, d);
    }
  }
  const double big = 4.0 * double(n + 1) * (penalty + dmax + 1.0) + 1e6;
  Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(n, n, big);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < khat; ++j) {
      double d = std::abs(truth[i] - est[j]);
      if (squared) d *= d;
      cost(i, j) = d;
    }
  }
  for (int i = 0; i < k; ++i) cost(i, khat + i) = penalty;
  for (int j = 0; j < khat; ++j) cost(k + j, j) = squared ? 0.0 : penalty;
  for (int i = k; i < n; ++i)
    for (int j = khat; j < n; ++j) cost(i, j) = 0.0;
  return cost;
}

} // namespace

GospaBreakdown gospa(const std::vector<double>& truth,
                     const std::vector<double>& est, const MetricConfig& cfg) {
  if (!(cfg.c > 0.0)) throw std::invalid_argument("gospa: cutoff must be > 0");
  const int k = int(truth.size());
  const int khat = int(est.size());
  GospaBreakdown out;
  if (k == 0 && khat == 0) return out;

  int assigned = 0;
  if (k > 0 && khat > 0) {
    const Eigen::MatrixXd cost = padded_cost(truth, est, cfg.c / 2.0, false);
    for (const auto& [i, j] : assign(cost)) {
      if (i >= k || j >= khat) continue;
      const double d = std::abs(truth[i] - est[j]);
      if (d > cfg.c) continue; // assigned iff within the cutoff
      out.dist += d;
      ++assigned;
    }
  }
  out.miss = cfg.c * double(k - assigned) / 2.0;
  out.false_ = cfg.c * double(khat - assigned) / 2.0;
  out.total = out.dist + out.miss + out.false_;
  return out;
}

double rmse(const std::vector<double>& truth, const std::vector<double>& est,
            const MetricConfig& cfg) {
  if (truth.empty()) throw std::domain_error("rmse: truth set must be nonempty");
  if (!(cfg.c_prime > 0.0))
    throw std::invalid_argument("rmse: cutoff must be > 0");
  const int k = int(truth.size());
  const int khat = int(est.size());

  double sq = 0.0;
  int assigned = 0;
  if (khat > 0) {
    const Eigen::MatrixXd cost =
        padded_cost(truth, est, cfg.c_prime * cfg.c_prime, true);
    for (const auto& [i, j] : assign(cost)) {
      if (i >= k || j >= khat) continue;
      const double d = std::abs(truth[i] - est[j]);
      if (d > cfg.c_prime) continue;
      sq += d * d;
      ++assigned;
    }
  }
  sq += cfg.c_prime * cfg.c_prime * double(k - assigned);
  return std::sqrt(sq / double(k));
}

MetricSummary average_metrics(const std::vector<MetricRow>& rows) {
  if (rows.empty())
    throw std::invalid_argument("average_metrics: empty input");
  MetricSummary s;
  for (const MetricRow& r : rows) {
    s.gospa.total += r.gospa.total;
    s.gospa.dist += r.gospa.dist;
    s.gospa.miss += r.gospa.miss;
    s.gospa.false_ += r.gospa.false_;
    if (std::isfinite(r.rmse)) {
      s.rmse += r.rmse;
      ++s.rmse_count;
    }
  }
  const double n = double(rows.size());
  s.gospa.total /= n;
  s.gospa.dist /= n;
  s.gospa.miss /= n;
  s.gospa.false_ /= n;
  if (s.rmse_count > 0) s.rmse /= double(s.rmse_count);
  else s.rmse = std::numeric_limits<double>::quiet_NaN();
  return s;
}

} // namespace svalse
