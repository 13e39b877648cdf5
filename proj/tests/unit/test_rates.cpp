#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "socs/error.hpp"
#include "socs/rates.hpp"

using namespace socs;

namespace {
const double kE = std::exp(1.0);

// Max of the multi-way objective over a grid of the simplex y_S + y_L1 + y_L2 = y.
double grid_max(double y, double step) {
  const int n = static_cast<int>(std::ceil(y / step));
  double best = 0;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; a + b <= n; ++b) {
      const double l1 = y * a / n, l2 = y * b / n;
      best = std::max(best, multiway_objective(std::max(0.0, y - l1 - l2), l1, l2));
    }
  return best;
}
}  // namespace

TEST(Rates, PointValues) {
  EXPECT_NEAR(convergence_rate(RateKind::Baseline, 1), 1 / kE, 1e-15);
  EXPECT_NEAR(convergence_rate(RateKind::TwoWayMatching, 1), 0.270671, 1e-6);
  EXPECT_NEAR(convergence_rate(RateKind::GeneralMatching, 1), 0.309744, 1e-6);
  EXPECT_NEAR(convergence_rate(RateKind::GeneralMatching, 1), std::exp(-2.0) * ((1 + kE) / 4 + kE / 2), 1e-15);
  EXPECT_NEAR(convergence_rate(RateKind::RandomOrderMatching, 1), 0.294973, 1e-6);
  EXPECT_NEAR(convergence_rate(RateKind::GeneralDisplay, 1), 0.355888, 1e-6);
  EXPECT_NEAR(convergence_rate(RateKind::GeneralDisplay, 1), 1.28 * std::exp(-1.28), 1e-15);
}

TEST(Rates, RatioConstants) {
  EXPECT_NEAR(1 - convergence_rate(RateKind::GeneralMatching, 1), 1 - 3 / (4 * kE) - 1 / (4 * kE * kE), 1e-12);
  EXPECT_NEAR(ratio_constant(RateKind::GeneralMatching), 0.690256, 1e-6);
  EXPECT_NEAR(ratio_constant(RateKind::RandomOrderMatching), 0.705027, 1e-6);
  EXPECT_NEAR(1 - convergence_rate(RateKind::GeneralAdWords, 1), 0.6339, 1e-4);
  EXPECT_GE(1 - convergence_rate(RateKind::GeneralAdWords, 1), 0.6338);
  EXPECT_GE(ratio_constant(RateKind::GeneralDisplay), 0.644);
  const double gamma = ratio_constant(RateKind::MultiwayOcsAdWords);
  EXPECT_GE(gamma, 0.504);
  EXPECT_LE(gamma, 0.52);
}

TEST(Rates, StartAtOneAndDecrease) {
  for (auto k : all_rate_kinds()) {
    EXPECT_NEAR(convergence_rate(k, 0), 1.0, 1e-12) << to_string(k);
    double prev = 1.0;
    for (int s = 1; s <= 300; ++s) {
      const double g = convergence_rate(k, s * 0.01);
      EXPECT_LE(g, prev + 1e-12) << to_string(k) << " y=" << s * 0.01;
      if (s <= 100) EXPECT_GE(g, 0.0);
      prev = g;
    }
  }
}

TEST(Rates, PiecesJoinContinuously) {
  for (auto k : {RateKind::GeneralMatching, RateKind::RandomOrderMatching}) {
    EXPECT_NEAR(convergence_rate(k, 0.5 - 1e-12), convergence_rate(k, 0.5 + 1e-12), 1e-9) << to_string(k);
  }
  EXPECT_NEAR(convergence_rate(RateKind::GeneralAdWords, kGeneralAdWordsC),
              convergence_rate(RateKind::Baseline, kGeneralAdWordsC), 1e-15);
}

TEST(Rates, ParseAndErrors) {
  for (auto k : all_rate_kinds()) EXPECT_EQ(rate_kind_from_string(to_string(k)), k);
  EXPECT_THROW(rate_kind_from_string("Nope"), InvalidInput);
  EXPECT_THROW(convergence_rate(RateKind::Baseline, -0.1), InvalidInput);
}

TEST(Rates, CurveWrapper) {
  RateCurve g{RateKind::TwoWayMatching};
  EXPECT_DOUBLE_EQ(g(0.5), convergence_rate(RateKind::TwoWayMatching, 0.5));
  EXPECT_EQ(g.name(), "TwoWayMatching");
}

TEST(MultiwayArgmax, AgreesWithGridSearch) {
  for (double y : {0.1, 0.3, 1.0, 2.0, 2.7, 3.5}) {
    const auto a = multiway_argmax(y);
    const double grid = grid_max(y, 1e-3);
    EXPECT_NEAR(a.y_s + a.y_l1 + a.y_l2, y, 1e-12);
    EXPECT_NEAR(multiway_objective(a.y_s, a.y_l1, a.y_l2), a.value, 1e-15);
    // the maximizer beats every grid point and a 1e-3 grid cannot miss by much
    EXPECT_GE(a.value, grid - 1e-12) << y;
    EXPECT_LE(a.value - grid, 1e-5) << y;
  }
}

TEST(MultiwayArgmax, ZeroMass) {
  auto a = multiway_argmax(0.0);
  EXPECT_EQ(a.value, 1.0);
}

TEST(AppendixChecks, AllPass) {
  for (const auto& c : appendix_b_checks()) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
}

TEST(AppendixChecks, PinnedValues) {
  bool seen = false;
  for (const auto& c : appendix_b_checks()) {
    if (c.name != "B7 f(1) < 1/30") continue;
    seen = true;
    EXPECT_NEAR(c.worst, 0.0331842, 1e-7);
    EXPECT_NEAR(c.worst, std::exp(-1.0) - 1.5 * std::exp(-1.5), 1e-15);
  }
  EXPECT_TRUE(seen);
}
