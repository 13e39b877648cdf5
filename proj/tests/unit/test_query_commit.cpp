#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "brute.hpp"
#include "socs/error.hpp"
#include "socs/query_commit.hpp"

using namespace socs;

namespace {

QueryCommitInstance qc_instance(std::vector<std::vector<double>> p) {
  QueryCommitInstance qc;
  qc.num_online = static_cast<int>(p.size());
  qc.num_offline = static_cast<int>(p[0].size());
  qc.p = std::move(p);
  return qc;
}

// Conditional match probabilities of online vertex t from the interval
// geometry of each neighborhood's mu and the pair rule.
std::vector<double> expected_next(const QcModel& m, const MatchState& s, int t) {
  const auto& nb = m.neighbors(t);
  const Instance& in = m.induced();
  std::vector<double> full(in.num_agents(), 0.0);
  auto w = [&](int j) { return j < 0 ? 1.0 : std::exp(2 * s.y[j]); };
  for (unsigned mask = 1; mask < (1u << nb.size()); ++mask) {
    const int i = m.type_of(t, mask);
    const double f = in.prob[t][i];
    if (f <= 0) continue;
    const auto mu = m.allocation().mu(in, t, i);
    const int J = static_cast<int>(mu.size());
    for (const auto& [ab, p] : brute::interval_pairs(mu)) {
      const int a = ab.first == J ? -1 : ab.first, b = ab.second == J ? -1 : ab.second;
      const bool fa = s.free(a), fb = s.free(b);
      if (a == b) {
        if (a >= 0 && fa) full[a] += f * p;
        continue;
      }
      if (fa && fb) {
        const double pa = w(a) / (w(a) + w(b));
        if (a >= 0) full[a] += f * p * pa;
        if (b >= 0) full[b] += f * p * (1 - pa);
      } else if (fa && a >= 0) {
        full[a] += f * p;
      } else if (fb && b >= 0) {
        full[b] += f * p;
      }
    }
  }
  std::vector<double> x;
  for (int j : nb) x.push_back(full[j]);
  return x;
}

using Edges = std::set<std::pair<int, int>>;

Edges edges_of(const Matching& m) {
  Edges e;
  for (const auto& x : m) e.insert({x.t, x.agent});
  return e;
}

}  // namespace

TEST(VertexPoint, ProbeOrderProducts) {
  auto x = vertex_point({1, 0}, {0.5, 0.25, 0.9});
  EXPECT_DOUBLE_EQ(x[1], 0.25);
  EXPECT_DOUBLE_EQ(x[0], 0.75 * 0.5);
  EXPECT_DOUBLE_EQ(x[2], 0.0);
}

TEST(ProbePolytope, Violation) {
  EXPECT_LE(probe_polytope_violation({0.5, 0.25}, {0.5, 0.5}), 1e-15);
  EXPECT_NEAR(probe_polytope_violation({0.6, 0.1}, {0.5, 0.5}), 0.1, 1e-15);
  EXPECT_NEAR(probe_polytope_violation({0.5, 0.4}, {0.5, 0.5}), 0.15, 1e-15);
  EXPECT_NEAR(probe_polytope_violation({-0.2, 0.0}, {0.5, 0.5}), 0.2, 1e-15);
}

TEST(VertexDecomposition, SingleVertex) {
  auto plan = vertex_decomposition({0.5, 0.25}, {0.5, 0.5});
  ASSERT_EQ(plan.vertices.size(), 1u);
  EXPECT_EQ(plan.vertices[0].order, (std::vector<int>{0, 1}));
  EXPECT_NEAR(plan.vertices[0].lambda, 1.0, 1e-12);
}

TEST(VertexDecomposition, ZeroIsTheEmptyOrder) {
  auto plan = vertex_decomposition({0.0, 0.0}, {0.5, 0.5});
  ASSERT_EQ(plan.vertices.size(), 1u);
  EXPECT_TRUE(plan.vertices[0].order.empty());
  EXPECT_EQ(plan.vertices[0].lambda, 1.0);
}

TEST(VertexDecomposition, SymmetricMixture) {
  auto plan = vertex_decomposition({0.375, 0.375}, {0.5, 0.5});
  std::map<std::vector<int>, double> lam;
  for (const auto& v : plan.vertices) lam[v.order] += v.lambda;
  EXPECT_NEAR(lam[(std::vector<int>{0, 1})], 0.5, 1e-10);
  EXPECT_NEAR(lam[(std::vector<int>{1, 0})], 0.5, 1e-10);
}

TEST(VertexDecomposition, RandomPointsAreReproduced) {
  Rng rng(3, 0, Stream::Misc);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(5));
    std::vector<double> p(n);
    for (auto& v : p) v = 0.05 + 0.95 * rng.uniform();
    // random convex combination of random vertices, shrunk toward 0
    std::vector<double> x(n, 0.0);
    const int k = 1 + static_cast<int>(rng.below(4));
    std::vector<double> wts(k);
    double tot = 0;
    for (auto& w : wts) tot += (w = rng.uniform());
    const double shrink = rng.uniform();
    for (int r = 0; r < k; ++r) {
      std::vector<int> ord;
      for (int j = 0; j < n; ++j)
        if (rng.uniform() < 0.7) ord.push_back(j);
      for (std::size_t a = ord.size(); a > 1; --a) std::swap(ord[a - 1], ord[rng.below(a)]);
      auto pt = vertex_point(ord, p);
      for (int j = 0; j < n; ++j) x[j] += shrink * wts[r] / tot * pt[j];
    }
    auto plan = vertex_decomposition(x, p);
    double lam = 0;
    for (const auto& v : plan.vertices) {
      EXPECT_GE(v.lambda, 0);
      lam += v.lambda;
    }
    EXPECT_NEAR(lam, 1.0, 1e-10);
    auto m = plan.marginals(p);
    for (int j = 0; j < n; ++j) EXPECT_NEAR(m[j], x[j], 1e-10) << "rep " << rep;
  }
}

TEST(VertexDecomposition, Errors) {
  EXPECT_THROW(vertex_decomposition({0.6, 0.3}, {0.5, 0.5}), InvalidInput);
  EXPECT_THROW(vertex_decomposition(std::vector<double>(7, 0.01), std::vector<double>(7, 0.5)), CapExceeded);
}

TEST(QcModel, InducedInstanceOneTypePerNeighborhood) {
  QcModel m(qc_instance({{0.5, 0.5}, {0.3, 0.0}}));
  const Instance& in = m.induced();
  EXPECT_EQ(in.T, 2);
  EXPECT_EQ(in.num_types(), 3 + 1);
  EXPECT_EQ(m.neighbors(1), (std::vector<int>{0}));
  EXPECT_NEAR(in.prob[0][m.type_of(0, 3u)], 0.25, 1e-15);
  EXPECT_NEAR(in.prob[1][m.type_of(1, 1u)], 0.3, 1e-15);
  EXPECT_EQ(in.type_ids[m.type_of(0, 3u)], "v0:j0,j1");
  EXPECT_EQ(in.problem, ProblemClass::Unweighted);
}

TEST(QcModel, RejectsTooManyNeighbors) {
  EXPECT_THROW(QcModel(qc_instance({std::vector<double>(7, 0.3)})), CapExceeded);
}

TEST(NextVertex, BothMatchedGivesZero) {
  QcModel m(qc_instance({{0.5, 0.5}, {0.5, 0.5}}));
  MatchState s(2);
  s.matched = {1, 1};
  for (double v : next_vertex_probabilities(m, s, 0)) EXPECT_EQ(v, 0.0);
}

TEST(NextVertex, PairRuleWithUnequalAllocation) {
  QcModel m(qc_instance({{1.0, 1.0}}));
  MatchState s(2);
  s.y = {0.5, 0.0};
  auto x = next_vertex_probabilities(m, s, 0);
  auto ref = expected_next(m, s, 0);
  EXPECT_NEAR(x[0], ref[0], 1e-15);
  EXPECT_NEAR(x[1], ref[1], 1e-15);
  const auto mu = m.allocation().mu(m.induced(), 0, m.type_of(0, 3u));
  if (std::abs(mu[0] - 0.5) < 1e-12) {
    EXPECT_NEAR(x[0], std::exp(1.0) / (std::exp(1.0) + 1), 1e-12);
    EXPECT_NEAR(x[1], 1 / (std::exp(1.0) + 1), 1e-12);
  }
}

TEST(NextVertex, MatchesIndependentComputation) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    QcModel m(generate_query_commit(3, 3, 0.7, seed));
    Rng rng(seed, 0, Stream::Misc);
    for (int rep = 0; rep < 20; ++rep) {
      MatchState s(3);
      for (int j = 0; j < 3; ++j) {
        s.matched[j] = rng.uniform() < 0.3;
        s.y[j] = rng.uniform();
      }
      for (int t = 0; t < 3; ++t) {
        auto x = next_vertex_probabilities(m, s, t);
        auto ref = expected_next(m, s, t);
        for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(x[k], ref[k], 1e-12);
      }
    }
  }
}

TEST(RunQueryCommit, CertainEdgeAlwaysMatches) {
  auto qc = qc_instance({{1.0}});
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    auto out = run_query_commit(qc, 1, trial);
    ASSERT_EQ(out.matching.size(), 1u);
    ASSERT_EQ(out.probes.size(), 1u);
    EXPECT_FALSE(out.probes[0].simulated);
    EXPECT_TRUE(out.probes[0].committed);
  }
}

TEST(RunQueryCommit, HalfEdgeMatchesHalfTheTime) {
  QcModel m(qc_instance({{0.5}}));
  const int n = 40000;
  int hit = 0;
  for (int k = 0; k < n; ++k) {
    TrialRng rng(2, k);
    hit += !run_query_commit(m, rng).matching.empty();
  }
  EXPECT_LT(std::abs(brute::binomial_z(hit, n, 0.5)), 4.0);
}

TEST(RunQueryCommit, EveryEdgeIsResolvedOnce) {
  QcModel m(generate_query_commit(3, 3, 0.8, 4));
  ProbePlanCache cache;
  for (int k = 0; k < 200; ++k) {
    TrialRng rng(4, k);
    auto out = run_query_commit(m, rng, &cache);
    std::set<std::pair<int, int>> seen;
    for (const auto& pr : out.probes) {
      EXPECT_TRUE(seen.insert({pr.online, pr.offline}).second);
      if (pr.committed) EXPECT_TRUE(pr.present && !pr.simulated);
    }
    int edges = 0;
    for (int t = 0; t < 3; ++t) edges += static_cast<int>(m.neighbors(t).size());
    EXPECT_EQ(static_cast<int>(seen.size()), edges);
    EXPECT_LE(out.max_marginal_error, 1e-10);
    EXPECT_NEAR(matched_value(m.qc(), out.matching), static_cast<double>(out.matching.size()), 0);
  }
  EXPECT_GT(cache.size(), 0u);
}

TEST(RunQueryCommit, CacheDoesNotChangeOutcomes) {
  QcModel m(generate_query_commit(3, 2, 0.9, 6));
  ProbePlanCache cache;
  for (int k = 0; k < 300; ++k) {
    TrialRng a(6, k), b(6, k);
    EXPECT_EQ(run_query_commit(m, a, &cache).matching, run_query_commit(m, b, nullptr).matching);
  }
}

TEST(RunQueryCommit, DistributionMatchesRandomOrder) {
  QcModel m(qc_instance({{0.5, 0.5}, {0.5, 0.5}}));
  ProbePlanCache cache;
  const int n = 100000;
  std::map<Edges, double> qc, ro;
  for (int k = 0; k < n; ++k) {
    TrialRng a(7, k);
    qc[edges_of(run_query_commit(m, a, &cache).matching)] += 1.0 / n;
    TrialRng b(8, k);
    ro[edges_of(run_random_order(m.plan(), b))] += 1.0 / n;
  }
  double tv = 0;
  for (auto& [e, p] : qc) tv += std::abs(p - ro[e]);
  for (auto& [e, p] : ro)
    if (!qc.count(e)) tv += p;
  EXPECT_LT(tv / 2, 0.02);
}

TEST(MatchedValue, Weighted) {
  auto qc = qc_instance({{0.5, 0.5}});
  qc.weight = {2, 5};
  EXPECT_EQ(matched_value(qc, {{0, kNoArrival, 1}}), 5.0);
  EXPECT_THROW(matched_value(qc, {{0, kNoArrival, 1}, {0, kNoArrival, 1}}), InvalidInput);
}
