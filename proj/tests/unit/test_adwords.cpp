#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "brute.hpp"
#include "builders.hpp"
#include "socs/adwords.hpp"
#include "socs/error.hpp"

using namespace socs;

namespace {

AdversarialSequence sequence(std::vector<double> budget, std::vector<std::vector<double>> bids,
                             std::vector<std::vector<double>> mu) {
  AdversarialSequence s;
  for (std::size_t j = 0; j < budget.size(); ++j) s.agent_ids.push_back("a" + std::to_string(j));
  s.budget = std::move(budget);
  s.bids = std::move(bids);
  s.mu = std::move(mu);
  return s;
}

}  // namespace

TEST(MarkAndOppose, UnmarkedStepIsUniform) {
  MarkBook book(2);
  auto never = [](int) { return false; };
  EXPECT_EQ(mark_and_oppose(book, 0, 1, never, 0.1, 0.2).selected, 0);
  EXPECT_EQ(mark_and_oppose(book, 0, 1, never, 0.1, 0.7).selected, 1);
  auto tr = mark_and_oppose(book, 0, 1, never, 0.9, 0.7);
  EXPECT_EQ(tr.mark, kNoMark);
  EXPECT_FALSE(tr.forced);
  EXPECT_EQ(book.marks, (std::vector<int>{0, 0}));
}

TEST(MarkAndOppose, SecondMarkOpposesTheFirst) {
  auto always = [](int m) { return m >= 0; };
  for (double first_choice : {0.2, 0.8}) {
    MarkBook book(3);
    auto a = mark_and_oppose(book, 0, 1, always, 0.1, first_choice);  // marked with 0
    EXPECT_EQ(a.mark, 0);
    EXPECT_EQ(a.mark_index, 1);
    for (double c : {0.0, 0.99}) {
      MarkBook b2 = book;
      auto b = mark_and_oppose(b2, 2, 0, always, 0.9, c);  // marked with 0 again
      EXPECT_EQ(b.mark, 0);
      EXPECT_EQ(b.mark_index, 2);
      EXPECT_TRUE(b.forced);
      EXPECT_EQ((a.selected == 0) + (b.selected == 0), 1);
    }
  }
}

TEST(MarkAndOppose, ThirdMarkIsUniformAgain) {
  auto always = [](int m) { return m >= 0; };
  MarkBook book(2);
  mark_and_oppose(book, 0, 1, always, 0.1, 0.1);
  mark_and_oppose(book, 0, 1, always, 0.1, 0.1);
  auto c = mark_and_oppose(book, 0, 1, always, 0.1, 0.9);
  EXPECT_EQ(c.mark_index, 3);
  EXPECT_FALSE(c.forced);
  EXPECT_EQ(c.selected, 1);
}

TEST(StepTwoWayAdwords, OnlyLargeBidsMark) {
  AdWordsState s({1.0, 1.0});
  auto tr = step_two_way_adwords(s, 0, 1, {0.5, 0.9}, 0.1, 0.3);  // pick 0, bid 0.5 < 2/3
  EXPECT_EQ(tr.mark, kNoMark);
  tr = step_two_way_adwords(s, 0, 1, {0.5, 0.9}, 0.9, 0.3);  // pick 1, bid 0.9 large
  EXPECT_EQ(tr.mark, 1);
  EXPECT_DOUBLE_EQ(s.spent[0], 1.0);
}

TEST(StepTwoWayAdwords, LargeBidThresholdIsTwoThirds) {
  AdWordsState s({3.0});
  EXPECT_TRUE(s.large(0, 2.0));
  EXPECT_FALSE(s.large(0, 1.999));
  EXPECT_FALSE(s.large(kBottom, 5.0));
}

TEST(StepTwoWayAdwords, DummyIsNeverCharged) {
  AdWordsState s({1.0});
  auto tr = step_two_way_adwords(s, 0, kBottom, {1.0}, 0.9, 0.9);
  EXPECT_EQ(tr.mark, kNoMark);
  EXPECT_EQ(tr.selected, kBottom);
  EXPECT_EQ(s.spent[0], 0.0);
}

TEST(GeneralAdwords, SmallBidsRoundIndependently) {
  // one pair type every step with small bids: each step picks agent 0 w.p. 1/2 independently
  auto in = build::adwords({{0.1, 0.1}}, std::vector<std::vector<double>>(4, {1.0}), {1.0, 1.0});
  auto x = FractionalAllocation::zeros(in);
  for (int t = 0; t < 4; ++t) x.at(t, 0, 0) = x.at(t, 0, 1) = 0.5;
  AdWordsPlan plan(in, x);
  const int n = 40000;
  std::vector<int> hist(5, 0);
  for (int k = 0; k < n; ++k) {
    TrialRng rng(2, k);
    auto out = run_general_adwords(plan, sample_arrivals(in, rng.arrival), rng, true);
    for (const auto& tr : out.trace) EXPECT_EQ(tr.mark, kNoMark);
    ++hist[static_cast<int>(std::lround(out.spent[0] / 0.1))];
  }
  const double binom[5] = {1. / 16, 4. / 16, 6. / 16, 4. / 16, 1. / 16};
  for (int c = 0; c < 5; ++c) EXPECT_LT(std::abs(brute::binomial_z(hist[c], n, binom[c])), 4.0);
}

TEST(GeneralAdwords, OneWayStepsSpendTheFullBid) {
  auto in = build::adwords({{0.7}}, {{1.0}, {1.0}}, {1.0});
  auto x = FractionalAllocation::zeros(in);
  x.at(0, 0, 0) = x.at(1, 0, 0) = 1.0;
  auto out = run_general_adwords(in, x, sample_arrivals(in, 1), 1);
  EXPECT_DOUBLE_EQ(out.spent[0], 1.4);
  EXPECT_DOUBLE_EQ(out.value[0], 1.0);
  EXPECT_DOUBLE_EQ(out.total_value(), 1.0);
}

TEST(GeneralAdwords, RepeatedLargePairGivesOneToEach) {
  auto in = build::adwords({{0.8, 0.8}}, {{1.0}, {1.0}}, {1.0, 1.0});
  auto x = FractionalAllocation::zeros(in);
  for (int t = 0; t < 2; ++t) x.at(t, 0, 0) = x.at(t, 0, 1) = 0.5;
  AdWordsPlan plan(in, x);
  int both = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    TrialRng rng(3, k);
    auto out = run_general_adwords(plan, sample_arrivals(in, rng.arrival), rng);
    both += out.spent[0] > 0 && out.spent[1] > 0;
  }
  // both steps mark the same agent w.p. 1/2, and then opposition splits them
  EXPECT_LT(std::abs(brute::binomial_z(both, n, 0.75)), 4.0);
}

TEST(GeneralAdwords, RejectsMatchingInstance) {
  auto in = build::unweighted({{1}}, {{1.0}});
  EXPECT_THROW(AdWordsPlan(in, FractionalAllocation::zeros(in)), InvalidInput);
}

TEST(MultiwayOcs, PointMassGoesToTheAgent) {
  auto seq = sequence({1.0, 1.0}, {{0.5, 0.5}}, {{0.0, 1.0}});
  for (std::uint64_t trial = 0; trial < 20; ++trial) EXPECT_EQ(run_multiway_ocs_adwords(seq, 1, trial).assignment[0], 1);
}

TEST(MultiwayOcs, HalfIntegerStepsFollowTheTwoWayRule) {
  auto seq = sequence({1.0, 1.0}, {{0.9, 0.9}, {0.8, 0.8}, {0.7, 0.7}}, {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    TrialRng rng(4, trial);
    auto out = run_multiway_ocs_adwords(seq, rng, true);
    AdWordsState s(seq.budget);
    ASSERT_EQ(out.trace.size(), 3u);
    for (int t = 0; t < 3; ++t) {
      auto tr = step_two_way_adwords(s, 0, 1, seq.bids[t], rng.mark.uniform_at(t), rng.choice.uniform_at(t));
      EXPECT_EQ(tr.selected, out.assignment[t]);
      EXPECT_EQ(tr.mark, out.trace[t].mark);
    }
    EXPECT_EQ(s.spent, out.spent);
  }
}

TEST(MultiwayOcs, RejectsNonDistributions) {
  auto seq = sequence({1.0}, {{0.5}}, {{0.7}});
  EXPECT_THROW(run_multiway_ocs_adwords(seq, 1), InvalidInput);
  auto neg = sequence({0.0}, {{0.5}}, {{1.0}});
  EXPECT_THROW(run_multiway_ocs_adwords(neg, 1), InvalidInput);
}

TEST(AdversarialSequence, YAndOptimum) {
  auto seq = sequence({1.0, 2.0}, {{0.5, 1.0}, {1.0, 1.0}}, {{0.5, 0.5}, {1.0, 0.0}});
  auto y = adversarial_y(seq);
  EXPECT_DOUBLE_EQ(y[0], 0.25 + 1.0);
  EXPECT_DOUBLE_EQ(y[1], 0.25);
  EXPECT_DOUBLE_EQ(adversarial_optimum(seq), 2.0);
  auto single = sequence({1.0}, {{0.9}, {0.9}}, {});
  EXPECT_DOUBLE_EQ(adversarial_optimum(single), 1.0);
}
