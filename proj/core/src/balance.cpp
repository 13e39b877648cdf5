#include "socs/balance.hpp"

#include <algorithm>
#include <cmath>

#include "socs/error.hpp"

namespace socs {

BalanceParams::BalanceParams(std::function<double(double)> g) : g_(std::move(g)) {
  const int nodes = 2 * kPanels + 1;
  h_ = kHorizon / (2 * kPanels);
  gnode_.resize(nodes);
  for (int k = 0; k < nodes; ++k) gnode_[k] = g_(k * h_);
  if (std::abs(gnode_[0] - 1.0) > 1e-12) throw InvalidInput("balance_parameters: g(0) must be 1");
  for (int k = 1; k < nodes; ++k)
    if (gnode_[k] > gnode_[k - 1] + 1e-12) throw InvalidInput("balance_parameters: g must be non-increasing");

  auto f = [&](int k) { return gnode_[k] * std::exp(-k * h_); };
  // Tail integrals at every node: Simpson over whole panels from even nodes,
  // and for odd nodes one panel [k-1, k+1] minus its left half via the
  // quadratic through the panel's three nodes.
  tail_.assign(nodes, 0.0);
  for (int k = nodes - 3; k >= 0; k -= 2) tail_[k] = tail_[k + 2] + h_ / 3 * (f(k) + 4 * f(k + 1) + f(k + 2));
  for (int k = 1; k < nodes; k += 2) {
    // int_{z_k}^{z_{k+1}} of the interpolating quadratic on (k-1, k, k+1)
    const double part = h_ / 12 * (-f(k - 1) + 8 * f(k) + 5 * f(k + 1));
    tail_[k] = tail_[k + 1] + part;
  }
  gamma_ = 1.0 - tail_[0];
  beta_.resize(nodes);
  slope_.resize(nodes);
  for (int k = 0; k < nodes; ++k) beta_[k] = gnode_[k] - std::exp(k * h_) * tail_[k];
  for (int k = 0; k < nodes; ++k) {
    double gp;
    if (k == 0) gp = (-3 * gnode_[0] + 4 * gnode_[1] - gnode_[2]) / (2 * h_);
    else if (k == nodes - 1) gp = (3 * gnode_[k] - 4 * gnode_[k - 1] + gnode_[k - 2]) / (2 * h_);
    else gp = (gnode_[k + 1] - gnode_[k - 1]) / (2 * h_);
    slope_[k] = gp + beta_[k];  // beta' = g' + beta
  }
}

double BalanceParams::tail(double y) const {
  if (y >= kHorizon) return 0.0;
  const int k = static_cast<int>(std::ceil(y / h_ - 1e-9));
  const double zk = k * h_;
  double part = 0.0;
  if (zk > y) {
    const int m = 8;
    const double w = (zk - y) / m;
    auto f = [&](double z) { return g_(z) * std::exp(-z); };
    double s = f(y) + f(zk);
    for (int q = 1; q < m; ++q) s += (q % 2 ? 4 : 2) * f(y + q * w);
    part = s * w / 3;
  }
  return tail_[std::min<int>(k, static_cast<int>(tail_.size()) - 1)] + part;
}

double BalanceParams::beta(double y) const {
  if (y < 0) throw InvalidInput("beta: y must be non-negative");
  return g_(y) - std::exp(y) * tail(y);
}

double BalanceParams::alpha(double y) const {
  const double d = 1e-5;
  double gp;
  if (y < d) gp = (-3 * g_(y) + 4 * g_(y + d) - g_(y + 2 * d)) / (2 * d);
  else gp = (g_(y + d) - g_(y - d)) / (2 * d);
  return -gp - beta(y);
}

double BalanceParams::beta_interp(double y) const {
  if (y <= 0) return beta_[0];
  const int last = static_cast<int>(beta_.size()) - 1;
  if (y >= kHorizon) return beta_[last];
  int k = std::min(last - 1, static_cast<int>(y / h_));
  const double s = (y - k * h_) / h_;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * beta_[k] + h10 * h_ * slope_[k] + h01 * beta_[k + 1] + h11 * h_ * slope_[k + 1];
}

double BalanceParams::beta_inverse(double v) const {
  if (v >= beta_[0]) return 0.0;
  if (v <= beta_.back()) return kHorizon;
  // beta is decreasing: locate the node cell, then bisect inside it.
  auto it = std::lower_bound(beta_.begin(), beta_.end(), v, [](double a, double b) { return a > b; });
  const int k = static_cast<int>(it - beta_.begin());
  double lo = (k - 1) * h_, hi = k * h_;
  for (int iter = 0; iter < 60 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (beta_interp(mid) > v ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BalanceParams balance_parameters(const RateCurve& g) {
  return BalanceParams([g](double y) { return g(y); });
}

std::vector<double> balance_fractional_step(const std::vector<double>& y, const std::vector<double>& bids,
                                            const std::vector<double>& budget, const BalanceParams& p,
                                            double* theta_out) {
  const std::size_t n = bids.size();
  if (y.size() != n || budget.size() != n) throw InvalidInput("balance_fractional_step: size mismatch");
  double hi = 0;
  for (std::size_t j = 0; j < n; ++j)
    if (bids[j] > 0) hi = std::max(hi, bids[j] * p.beta_interp(y[j]));
  if (!(hi > 0)) throw InvalidInput("balance_fractional_step: all bids are zero");
  auto mu_at = [&](double theta, std::vector<double>* out) {
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double m = 0;
      if (bids[j] > 0) m = budget[j] / bids[j] * std::max(0.0, p.beta_inverse(theta / bids[j]) - y[j]);
      if (out) (*out)[j] = m;
      s += m;
    }
    return s;
  };
  double lo = hi / 2;
  while (mu_at(lo, nullptr) < 1.0) {
    lo /= 2;
    if (lo < 1e-300) throw SolverFailure("balance_fractional_step: threshold bracket not found");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (mu_at(mid, nullptr) >= 1.0 ? lo : hi) = mid;
  }
  std::vector<double> mu(n, 0.0);
  const double s = mu_at(lo, &mu);
  for (double& m : mu) m /= s;
  if (theta_out) *theta_out = lo;
  return mu;
}

AdversarialSequence balance_allocate(const AdversarialSequence& seq, const BalanceParams& p) {
  AdversarialSequence out = seq;
  out.mu.assign(seq.T(), std::vector<double>(seq.num_agents(), 0.0));
  std::vector<double> y(seq.num_agents(), 0.0);
  for (int t = 0; t < seq.T(); ++t) {
    out.mu[t] = balance_fractional_step(y, seq.bids[t], seq.budget, p);
    for (int j = 0; j < seq.num_agents(); ++j) y[j] += out.mu[t][j] * seq.bids[t][j] / seq.budget[j];
  }
  return out;
}

OcsOutcome run_balance_ocs_end_to_end(const AdversarialSequence& seq, const BalanceParams& p, TrialRng& rng) {
  return run_multiway_ocs_adwords(balance_allocate(seq, p), rng);
}

}  // namespace socs
