#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "socs/error.hpp"
#include "socs/instance.hpp"

using namespace socs;

namespace {

Instance two_agent_unweighted() {
  Instance in;
  in.problem = ProblemClass::Unweighted;
  in.T = 1;
  in.agent_ids = {"a", "b"};
  in.type_ids = {"i"};
  in.value = {{1, 1}};
  in.prob = {{1.0}};
  return in;
}

// Independent hindsight oracle: try every injective assignment of realized
// items to agents (or to nobody) recursively.
double brute_matching(const Instance& in, const ArrivalSequence& a) {
  std::vector<int> items;
  for (int t : a.types)
    if (t != kNoArrival) items.push_back(t);
  std::vector<char> used(in.num_agents(), 0);
  std::function<double(std::size_t)> rec = [&](std::size_t k) -> double {
    if (k == items.size()) return 0.0;
    double best = rec(k + 1);
    for (int j = 0; j < in.num_agents(); ++j) {
      double g = in.problem == ProblemClass::DisplayAds ? in.value[items[k]][j]
                 : in.adjacent(items[k], j)
                     ? (in.problem == ProblemClass::VertexWeighted ? in.agent_weight[j] : 1.0)
                     : 0.0;
      if (used[j] || g <= 0) continue;
      used[j] = 1;
      best = std::max(best, g + rec(k + 1));
      used[j] = 0;
    }
    return best;
  };
  return rec(0);
}

double brute_adwords(const Instance& in, const ArrivalSequence& a) {
  std::vector<int> items;
  for (int t : a.types)
    if (t != kNoArrival) items.push_back(t);
  std::vector<double> spend(in.num_agents(), 0.0);
  std::function<double(std::size_t)> rec = [&](std::size_t k) -> double {
    if (k == items.size()) {
      double v = 0;
      for (int j = 0; j < in.num_agents(); ++j) v += std::min(spend[j], in.budget[j]);
      return v;
    }
    double best = rec(k + 1);
    for (int j = 0; j < in.num_agents(); ++j) {
      spend[j] += in.value[items[k]][j];
      best = std::max(best, rec(k + 1));
      spend[j] -= in.value[items[k]][j];
    }
    return best;
  };
  return rec(0);
}

}  // namespace

TEST(Validate, ValidInstanceHasEmptyReport) {
  EXPECT_TRUE(validate(two_agent_unweighted()).ok());
}

TEST(Validate, ProbabilityOutOfRange) {
  auto in = two_agent_unweighted();
  in.prob[0][0] = 1.2;
  auto rep = validate(in);
  ASSERT_FALSE(rep.ok());
  bool found = false;
  for (auto& v : rep.violations)
    if (v.find("probability out of range at t=1") != std::string::npos) found = true;
  EXPECT_TRUE(found);
}

TEST(Validate, ZeroBudget) {
  Instance in;
  in.problem = ProblemClass::AdWords;
  in.T = 1;
  in.agent_ids = {"a"};
  in.budget = {0.0};
  in.type_ids = {"i"};
  in.value = {{0.5}};
  in.prob = {{1.0}};
  auto rep = validate(in);
  ASSERT_FALSE(rep.ok());
  bool found = false;
  for (auto& v : rep.violations)
    if (v.find("budget must be positive") != std::string::npos) found = true;
  EXPECT_TRUE(found);
}

TEST(Validate, StepMassAboveOneAndShapeErrors) {
  Instance in = two_agent_unweighted();
  in.type_ids = {"i", "k"};
  in.value = {{1, 1}, {1, 0}};
  in.prob = {{0.7, 0.4}};
  EXPECT_FALSE(validate(in).ok());
  in.prob = {{0.7, 0.3}};
  EXPECT_TRUE(validate(in).ok());
  in.value[1][1] = 0.5;  // non-indicator edge in an unweighted instance
  EXPECT_FALSE(validate(in).ok());
  in.value[1][1] = 0.0;
  in.prob.push_back({0.1, 0.1});  // T mismatch
  EXPECT_FALSE(validate(in).ok());
}

TEST(SampleArrivals, PointMass) {
  auto in = two_agent_unweighted();
  for (int s = 0; s < 100; ++s) EXPECT_EQ(sample_arrivals(in, s).types, std::vector<int>{0});
}

TEST(SampleArrivals, HalfFrequency) {
  auto in = two_agent_unweighted();
  in.prob = {{0.5}};
  int hits = 0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) hits += sample_arrivals(in, 11, k).types[0] == 0;
  EXPECT_NEAR(hits / double(n), 0.5, 0.002);
}

TEST(SampleArrivals, Deterministic) {
  GeneratorSpec g{ProblemClass::Unweighted, 3, 3, 8, 0.5, 5};
  auto in = generate(g);
  EXPECT_EQ(sample_arrivals(in, 9, 2).types, sample_arrivals(in, 9, 2).types);
  EXPECT_EQ(sample_arrivals(in, 9, 2).types.size(), 8u);
}

TEST(SampleArrivals, ChiSquareMarginals) {
  GeneratorSpec g{ProblemClass::Unweighted, 3, 2, 3, 0.7, 21};
  auto in = generate(g);
  const int n = 100000;
  std::vector<std::vector<int>> cnt(in.T, std::vector<int>(in.num_types() + 1, 0));
  for (int k = 0; k < n; ++k) {
    auto a = sample_arrivals(in, 4, k);
    for (int t = 0; t < in.T; ++t) cnt[t][a.types[t] == kNoArrival ? in.num_types() : a.types[t]]++;
  }
  // chi2 critical values at alpha = 0.001 for df = 1..3
  const double crit[] = {0, 10.83, 13.82, 16.27};
  for (int t = 0; t < in.T; ++t) {
    double chi2 = 0;
    int df = -1;
    double rest = 1.0;
    for (int i = 0; i <= in.num_types(); ++i) {
      double p = i < in.num_types() ? in.prob[t][i] : rest;
      if (i < in.num_types()) rest -= in.prob[t][i];
      if (p <= 1e-12) continue;
      chi2 += (cnt[t][i] - n * p) * (cnt[t][i] - n * p) / (n * p);
      ++df;
    }
    ASSERT_GE(df, 1);
    EXPECT_LT(chi2, crit[std::min(df, 3)]) << "t=" << t;
  }
}

TEST(CumulativeAllocation, Examples) {
  auto in = two_agent_unweighted();
  auto x = FractionalAllocation::zeros(in);
  x.at(0, 0, 0) = 0.5;
  EXPECT_DOUBLE_EQ(cumulative_allocation(in, x, 0), 0.5);

  Instance ad;
  ad.problem = ProblemClass::AdWords;
  ad.T = 1;
  ad.agent_ids = {"a"};
  ad.budget = {1.0};
  ad.type_ids = {"i"};
  ad.value = {{0.5}};
  ad.prob = {{1.0}};
  auto xa = FractionalAllocation::zeros(ad);
  xa.at(0, 0, 0) = 1.0;
  EXPECT_DOUBLE_EQ(cumulative_allocation(ad, xa, 0), 0.5);

  Instance d;
  d.problem = ProblemClass::DisplayAds;
  d.T = 1;
  d.agent_ids = {"a"};
  d.type_ids = {"hi", "lo"};
  d.value = {{1.0}, {0.2}};
  d.prob = {{0.5, 0.5}};
  auto xd = FractionalAllocation::zeros(d);
  xd.at(0, 0, 0) = 0.3;
  xd.at(0, 1, 0) = 0.3;
  EXPECT_DOUBLE_EQ(cumulative_allocation(d, xd, 0, -1, 0.5), 0.3);
  EXPECT_DOUBLE_EQ(cumulative_allocation(d, xd, 0, -1, 0.2), 0.6);
}

TEST(CumulativeAllocation, UnknownAgentThrows) {
  auto in = two_agent_unweighted();
  auto x = FractionalAllocation::zeros(in);
  EXPECT_THROW(cumulative_allocation(in, x, 5), InvalidInput);
}

TEST(CumulativeAllocation, Additive) {
  GeneratorSpec g{ProblemClass::AdWords, 3, 3, 6, 0.8, 3};
  auto in = generate(g);
  auto x = FractionalAllocation::zeros(in);
  Rng r(77ULL);
  for (int t = 0; t < in.T; ++t)
    for (int i = 0; i < in.num_types(); ++i)
      for (int j = 0; j < in.num_agents(); ++j) x.at(t, i, j) = in.prob[t][i] * r.uniform() / 3;
  for (int j = 0; j < 3; ++j)
    for (int t = 0; t <= in.T; ++t) {
      double whole = cumulative_allocation_between(in, x, j, 0, in.T);
      double split =
          cumulative_allocation_between(in, x, j, 0, t) + cumulative_allocation_between(in, x, j, t, in.T);
      EXPECT_NEAR(whole, split, 1e-15);
    }
}

TEST(Hindsight, Examples) {
  auto in = two_agent_unweighted();
  EXPECT_DOUBLE_EQ(hindsight_optimum(in, {{0}}), 1.0);

  Instance two;
  two.problem = ProblemClass::Unweighted;
  two.T = 2;
  two.agent_ids = {"1", "2"};
  two.type_ids = {"i"};
  two.value = {{1, 0}};
  two.prob = {{1.0}, {1.0}};
  EXPECT_DOUBLE_EQ(hindsight_optimum(two, {{0, 0}}), 1.0);

  Instance ad;
  ad.problem = ProblemClass::AdWords;
  ad.T = 2;
  ad.agent_ids = {"a"};
  ad.budget = {1.0};
  ad.type_ids = {"i"};
  ad.value = {{0.9}};
  ad.prob = {{1.0}, {1.0}};
  EXPECT_DOUBLE_EQ(hindsight_optimum(ad, {{0, 0}}), 1.0);
}

TEST(Hindsight, AdWordsCap) {
  GeneratorSpec g{ProblemClass::AdWords, 2, 2, 15, 1.0, 1};
  auto in = generate(g);
  ArrivalSequence a{std::vector<int>(15, 0)};
  EXPECT_THROW(hindsight_optimum(in, a), CapExceeded);
}

TEST(Hindsight, MatchesBruteForceOnRandomInstances) {
  const ProblemClass classes[] = {ProblemClass::Unweighted, ProblemClass::VertexWeighted,
                                  ProblemClass::DisplayAds, ProblemClass::AdWords};
  for (auto c : classes)
    for (int s = 0; s < 30; ++s) {
      GeneratorSpec g{c, 3, 3, 5, 0.6, static_cast<std::uint64_t>(100 + s)};
      auto in = generate(g);
      auto a = sample_arrivals(in, s, 0);
      double want = c == ProblemClass::AdWords ? brute_adwords(in, a) : brute_matching(in, a);
      EXPECT_NEAR(hindsight_optimum(in, a), want, 1e-9) << to_string(c) << " seed " << s;
    }
}

TEST(Hindsight, MonotoneInEdgesAndWeights) {
  for (int s = 0; s < 40; ++s) {
    GeneratorSpec g{s % 2 ? ProblemClass::DisplayAds : ProblemClass::Unweighted, 3, 3, 5, 0.5,
                    static_cast<std::uint64_t>(s)};
    auto in = generate(g);
    auto a = sample_arrivals(in, 3, s);
    double before = hindsight_optimum(in, a);
    Rng r(static_cast<std::uint64_t>(s));
    int i = static_cast<int>(r.below(3)), j = static_cast<int>(r.below(3));
    in.value[i][j] = in.problem == ProblemClass::DisplayAds ? std::min(1.0, in.value[i][j] + 0.3) : 1.0;
    EXPECT_GE(hindsight_optimum(in, a), before - 1e-12);
  }
}

TEST(Generate, Contracts) {
  auto in = generate({ProblemClass::Unweighted, 3, 3, 5, 0.5, 7});
  EXPECT_TRUE(validate(in).ok());
  int edges = 0;
  for (auto& row : in.value)
    for (double v : row) edges += v > 0;
  EXPECT_LE(edges, 9);

  auto ad = generate({ProblemClass::AdWords, 2, 2, 4, 1.0, 1});
  EXPECT_TRUE(validate(ad).ok());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      EXPECT_GE(ad.value[i][j], 0.0);
      EXPECT_LE(ad.value[i][j], ad.budget[j]);
    }

  auto again = generate({ProblemClass::Unweighted, 3, 3, 5, 0.5, 7});
  EXPECT_EQ(in.value, again.value);
  EXPECT_EQ(in.prob, again.prob);

  for (int s = 0; s < 50; ++s)
    for (auto c : {ProblemClass::Unweighted, ProblemClass::VertexWeighted, ProblemClass::AdWords,
                   ProblemClass::DisplayAds})
      EXPECT_TRUE(validate(generate({c, 1 + s % 4, 1 + s % 3, 1 + s % 5, 0.4, static_cast<std::uint64_t>(s)})).ok());
}
