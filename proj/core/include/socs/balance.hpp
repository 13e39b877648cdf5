#pragma once

#include <functional>
#include <vector>

#include "socs/adwords.hpp"
#include "socs/rates.hpp"

namespace socs {

// Gamma, beta, alpha for a convergence rate g; beta(y) = g(y) - e^y int_y^inf g e^{-z} dz.
class BalanceParams {
 public:
  static constexpr double kHorizon = 40.0;
  static constexpr int kPanels = 10000;  // composite Simpson panels on [0, kHorizon]

  explicit BalanceParams(std::function<double(double)> g);

  double gamma() const { return gamma_; }
  // Quadrature-exact evaluation (node tables plus a local Simpson piece).
  double beta(double y) const;
  // -g'(y) - beta(y), g' by central differences.
  double alpha(double y) const;
  // Cubic Hermite interpolation of beta on the node grid; used by the allocator.
  double beta_interp(double y) const;
  // Smallest y in [0, kHorizon] with beta_interp(y) <= v (bisection); 0 if v >= beta(0).
  double beta_inverse(double v) const;
  double g(double y) const { return g_(y); }

 private:
  double tail(double y) const;  // int_y^H g e^{-z} dz
  std::function<double(double)> g_;
  double h_;
  std::vector<double> gnode_, tail_, beta_, slope_;
  double gamma_ = 0;
};

BalanceParams balance_parameters(const RateCurve& g);

// mu^t with sum 1 from the water-filling threshold theta.
std::vector<double> balance_fractional_step(const std::vector<double>& y, const std::vector<double>& bids,
                                            const std::vector<double>& budget, const BalanceParams& p,
                                            double* theta_out = nullptr);

// Fills seq.mu with the Balance allocation (deterministic).
AdversarialSequence balance_allocate(const AdversarialSequence& seq, const BalanceParams& p);

OcsOutcome run_balance_ocs_end_to_end(const AdversarialSequence& seq, const BalanceParams& p, TrialRng& rng);

}  // namespace socs
