#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "socs/balance.hpp"
#include "socs/error.hpp"
#include "socs/rates.hpp"

using namespace socs;

namespace {

const BalanceParams& exp_params() {
  static const BalanceParams p([](double y) { return std::exp(-y); });
  return p;
}

const BalanceParams& multiway_params() {
  static const BalanceParams p = balance_parameters({RateKind::MultiwayOcsAdWords});
  return p;
}

// int_0^y alpha by composite Simpson
double alpha_integral(const BalanceParams& p, double y, int panels) {
  const double h = y / (2 * panels);
  double s = p.alpha(0) + p.alpha(y);
  for (int k = 1; k < 2 * panels; ++k) s += (k % 2 ? 4 : 2) * p.alpha(k * h);
  return s * h / 3;
}

}  // namespace

TEST(BalanceParams, ExponentialClosedForms) {
  const auto& p = exp_params();
  EXPECT_NEAR(p.gamma(), 0.5, 1e-12);
  for (double y : {0.0, 0.1, 0.5, 1.0, 2.5, 7.0}) {
    EXPECT_NEAR(p.beta(y), std::exp(-y) / 2, 1e-12) << y;
    EXPECT_NEAR(p.beta_interp(y), std::exp(-y) / 2, 1e-10) << y;
    EXPECT_NEAR(p.alpha(y), std::exp(-y) / 2, 1e-9) << y;
  }
}

TEST(BalanceParams, IdentityForExponential) {
  const auto& p = exp_params();
  for (double y : {0.25, 0.5, 1.0, 2.0}) EXPECT_NEAR(alpha_integral(p, y, 200) + p.beta(y), p.gamma(), 1e-8);
}

TEST(BalanceParams, IdentityForMultiwayRate) {
  const auto& p = multiway_params();
  for (double y : {0.25, 0.5, 1.0}) EXPECT_NEAR(alpha_integral(p, y, 400) + p.beta(y), p.gamma(), 1e-8) << y;
}

TEST(BalanceParams, MultiwayGammaInRange) {
  const double g = multiway_params().gamma();
  EXPECT_GE(g, 0.504);
  EXPECT_LE(g, 0.52);
}

TEST(BalanceParams, SimpsonAgreesWithAdaptiveQuadrature) {
  EXPECT_NEAR(multiway_params().gamma(), adversarial_gamma({RateKind::MultiwayOcsAdWords}), 1e-9);
  EXPECT_NEAR(exp_params().gamma(), adversarial_gamma({RateKind::Baseline}), 1e-9);
}

TEST(BalanceParams, RejectsInvalidCurves) {
  EXPECT_THROW(BalanceParams([](double) { return 0.5; }), InvalidInput);
  EXPECT_THROW(BalanceParams([](double y) { return std::min(1.0, 1.0 - y + y * y); }), InvalidInput);
}

TEST(BalanceParams, InverseUndoesInterpolant) {
  const auto& p = multiway_params();
  for (double y : {0.0, 0.3, 1.0, 3.3, 10.0}) EXPECT_NEAR(p.beta_inverse(p.beta_interp(y)), y, 1e-8) << y;
  EXPECT_EQ(p.beta_inverse(1.0), 0.0);
}

TEST(BalanceStep, SingleAgentThreshold) {
  double theta = 0;
  auto mu = balance_fractional_step({0.0}, {1.0}, {1.0}, exp_params(), &theta);
  ASSERT_EQ(mu.size(), 1u);
  EXPECT_NEAR(mu[0], 1.0, 1e-15);
  EXPECT_NEAR(theta, std::exp(-1.0) / 2, 1e-9);
  EXPECT_NEAR(theta, 0.18394, 1e-5);
}

TEST(BalanceStep, SymmetricAgentsSplitEvenly) {
  auto mu = balance_fractional_step({0.3, 0.3}, {0.4, 0.4}, {1.0, 1.0}, multiway_params());
  EXPECT_NEAR(mu[0], 0.5, 1e-12);
  EXPECT_NEAR(mu[1], 0.5, 1e-12);
}

TEST(BalanceStep, SaturatedAgentGetsLess) {
  auto mu = balance_fractional_step({0.0, 3.0}, {0.5, 0.5}, {1.0, 1.0}, multiway_params());
  EXPECT_GT(mu[0], 0.99);
  EXPECT_NEAR(mu[0] + mu[1], 1.0, 1e-12);
  double prev = 1.0;
  for (double y : {0.0, 0.2, 0.5, 1.0, 2.0}) {
    auto m = balance_fractional_step({0.0, y}, {0.5, 0.5}, {1.0, 1.0}, multiway_params());
    EXPECT_LE(m[1], prev + 1e-12);
    prev = m[1];
  }
}

TEST(BalanceStep, ZeroBidAgentGetsNothing) {
  auto mu = balance_fractional_step({0.0, 0.0}, {0.0, 0.3}, {1.0, 1.0}, multiway_params());
  EXPECT_EQ(mu[0], 0.0);
  EXPECT_NEAR(mu[1], 1.0, 1e-12);
  EXPECT_THROW(balance_fractional_step({0.0}, {0.0}, {1.0}, multiway_params()), InvalidInput);
}

TEST(BalanceEndToEnd, SingleAgentTakesEverything) {
  AdversarialSequence seq;
  seq.agent_ids = {"a"};
  seq.budget = {1.0};
  seq.bids = {{0.4}, {0.4}, {0.4}};
  TrialRng rng(1, 0);
  auto out = run_balance_ocs_end_to_end(seq, multiway_params(), rng);
  EXPECT_EQ(out.assignment, (std::vector<int>{0, 0, 0}));
  EXPECT_DOUBLE_EQ(out.total_value(), 1.0);
}

TEST(BalanceEndToEnd, UpperTriangularInstance) {
  // stage s has 4 items bidding 1/4 on agents s..2; OPT = 3
  AdversarialSequence seq;
  seq.agent_ids = {"a0", "a1", "a2"};
  seq.budget = {1.0, 1.0, 1.0};
  for (int s = 0; s < 3; ++s)
    for (int r = 0; r < 4; ++r) {
      std::vector<double> b(3, 0.0);
      for (int j = s; j < 3; ++j) b[j] = 0.25;
      seq.bids.push_back(b);
    }
  const double opt = adversarial_optimum(seq);
  EXPECT_DOUBLE_EQ(opt, 3.0);
  auto alloc = balance_allocate(seq, multiway_params());
  const int n = 100000;
  double sum = 0;
  for (int k = 0; k < n; ++k) {
    TrialRng rng(5, k);
    sum += run_multiway_ocs_adwords(alloc, rng).total_value();
  }
  EXPECT_GE(sum / n / opt, 0.504 - 0.02);
}
