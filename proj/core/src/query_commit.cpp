#include "socs/query_commit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "socs/error.hpp"
#include "socs/simplex.hpp"

namespace socs {

std::vector<double> vertex_point(const std::vector<int>& order, const std::vector<double>& p) {
  std::vector<double> x(p.size(), 0.0);
  double miss = 1.0;
  for (int j : order) {
    x[j] = miss * p[j];
    miss *= 1.0 - p[j];
  }
  return x;
}

std::vector<double> ProbePlan::marginals(const std::vector<double>& p) const {
  std::vector<double> m(p.size(), 0.0);
  for (const auto& v : vertices) {
    auto pt = vertex_point(v.order, p);
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += v.lambda * pt[j];
  }
  return m;
}

double probe_polytope_violation(const std::vector<double>& x, const std::vector<double>& p) {
  const int n = static_cast<int>(x.size());
  if (static_cast<int>(p.size()) != n) throw InvalidInput("probe polytope: x and p differ in length");
  if (n > 20) throw CapExceeded("probe polytope: too many neighbors to enumerate subsets");
  double worst = -1.0;
  for (double v : x) worst = std::max(worst, -v);
  for (unsigned s = 1; s < (1u << n); ++s) {
    double lhs = 0, miss = 1;
    for (int j = 0; j < n; ++j)
      if (s >> j & 1u) {
        lhs += x[j];
        miss *= 1.0 - p[j];
      }
    worst = std::max(worst, lhs - (1.0 - miss));
  }
  return worst;
}

ProbePlan vertex_decomposition(const std::vector<double>& x, const std::vector<double>& p, double tol) {
  const int n = static_cast<int>(x.size());
  if (n > kProbeNeighborCap) throw CapExceeded("vertex decomposition supports at most 6 neighbors");
  if (probe_polytope_violation(x, p) > tol) throw InvalidInput("x lies outside the probe polytope");

  std::vector<int> cand;
  for (int j = 0; j < n; ++j)
    if (x[j] > 1e-15) cand.push_back(j);
  if (cand.empty()) return {{{{}, 1.0}}};

  // every ordered subset of the candidates, deduplicated by point
  std::vector<std::vector<int>> orders;
  std::vector<std::vector<double>> points;
  std::vector<int> cur;
  std::vector<char> used(cand.size(), 0);
  std::function<void()> rec = [&] {
    auto pt = vertex_point(cur, p);
    bool dup = false;
    for (const auto& q : points) {
      bool same = true;
      for (int j : cand) same = same && std::abs(q[j] - pt[j]) <= 1e-15;
      if (same) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      orders.push_back(cur);
      points.push_back(std::move(pt));
    }
    for (std::size_t c = 0; c < cand.size(); ++c) {
      if (used[c]) continue;
      used[c] = 1;
      cur.push_back(cand[c]);
      rec();
      cur.pop_back();
      used[c] = 0;
    }
  };
  rec();

  LinearProgram lp;
  lp.num_vars = static_cast<int>(points.size());
  lp.objective.assign(lp.num_vars, 0.0);
  for (int j : cand) {
    std::vector<double> a(lp.num_vars);
    for (int r = 0; r < lp.num_vars; ++r) a[r] = points[r][j];
    lp.add_row(std::move(a), RowSense::Eq, x[j]);
  }
  lp.add_row(std::vector<double>(lp.num_vars, 1.0), RowSense::Eq, 1.0);
  auto sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw SolverFailure(std::string("vertex decomposition LP: ") + to_string(sol.status));

  ProbePlan plan;
  for (int r = 0; r < lp.num_vars; ++r)
    if (sol.x[r] > 0) plan.vertices.push_back({orders[r], sol.x[r]});
  auto m = plan.marginals(p);
  for (int j = 0; j < n; ++j)
    if (std::abs(m[j] - x[j]) > tol) throw SolverFailure("vertex decomposition does not reproduce x");
  return plan;
}

QcModel::QcModel(const QueryCommitInstance& qc, const LpOptions& opt) : qc_(qc) {
  auto rep = validate(qc);
  if (!rep.ok()) throw InvalidInput(rep.violations.front());
  const int T = qc.num_online, J = qc.num_offline;

  induced_.problem = qc.weight.empty() ? ProblemClass::Unweighted : ProblemClass::VertexWeighted;
  induced_.T = T;
  for (int j = 0; j < J; ++j) induced_.agent_ids.push_back("j" + std::to_string(j));
  if (!qc.weight.empty()) induced_.agent_weight = qc.weight;

  nbr_.resize(T);
  type_.resize(T);
  dist_.resize(T);
  std::vector<std::pair<int, unsigned>> owner;  // type -> (t, mask)
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < J; ++j)
      if (qc.p[t][j] > 0) nbr_[t].push_back(j);
    const int d = static_cast<int>(nbr_[t].size());
    if (d > kProbeNeighborCap) throw CapExceeded("online vertex " + std::to_string(t) + " has more than 6 neighbors");
    type_[t].assign(1u << d, -1);
    for (unsigned m = 1; m < (1u << d); ++m) {
      type_[t][m] = static_cast<int>(owner.size());
      owner.push_back({t, m});
    }
  }
  const int I = static_cast<int>(owner.size());
  induced_.value.assign(I, std::vector<double>(J, 0.0));
  induced_.prob.assign(T, std::vector<double>(I, 0.0));
  for (int i = 0; i < I; ++i) {
    auto [t, m] = owner[i];
    std::string id = "v" + std::to_string(t) + ":";
    double f = 1.0;
    for (std::size_t k = 0; k < nbr_[t].size(); ++k) {
      const int j = nbr_[t][k];
      const double pj = qc.p[t][j];
      if (m >> k & 1u) {
        induced_.value[i][j] = 1.0;
        f *= pj;
        id += "j" + std::to_string(j) + ",";
      } else {
        f *= 1.0 - pj;
      }
    }
    id.pop_back();
    induced_.type_ids.push_back(id);
    induced_.prob[t][i] = f;
  }

  std::tie(x_, lp_) = solve_matching_lp(induced_, opt);
  plan_ = std::make_unique<MatchingPlan>(induced_, x_);
  for (int t = 0; t < T; ++t) {
    dist_[t].resize(type_[t].size());
    for (unsigned m = 1; m < type_[t].size(); ++m) {
      const int i = type_[t][m];
      if (induced_.prob[t][i] > 0) dist_[t][m] = surrogate_distribution(x_.mu(induced_, t, i));
    }
  }
}

std::vector<double> next_vertex_probabilities(const QcModel& model, const MatchState& s, int t) {
  const auto& nb = model.neighbors(t);
  const Instance& in = model.induced();
  std::vector<double> full(in.num_agents(), 0.0);
  for (unsigned m = 1; m < (1u << nb.size()); ++m) {
    const double f = in.prob[t][model.type_of(t, m)];
    if (f <= 0) continue;
    for (const auto& o : model.surrogates(t, m)) {
      const double q = f * o.prob;
      const SurrogateType& st = o.type;
      if (!st.two_way) {
        if (st.a != kBottom && s.free(st.a)) full[st.a] += q;
        continue;
      }
      const bool fa = s.free(st.a), fb = s.free(st.b);
      if (fa && fb) {
        const double pa = pair_selection_probability(s, st.a, st.b);
        full[st.a] += q * pa;
        if (st.b != kBottom) full[st.b] += q * (1.0 - pa);
      } else if (fa) {
        full[st.a] += q;
      } else if (fb && st.b != kBottom) {
        full[st.b] += q;
      }
    }
  }
  std::vector<double> x(nb.size());
  for (std::size_t k = 0; k < nb.size(); ++k) x[k] = full[nb[k]];
  return x;
}

const ProbePlan* ProbePlanCache::find(const Key& k) const {
  auto it = plans_.find(k);
  return it == plans_.end() ? nullptr : &it->second;
}

const ProbePlan& ProbePlanCache::insert(const Key& k, ProbePlan plan) {
  return plans_.insert_or_assign(k, std::move(plan)).first->second;
}

QcOutcome run_query_commit(const QcModel& model, TrialRng& rng, ProbePlanCache* cache) {
  const QueryCommitInstance& qc = model.qc();
  const int T = qc.num_online, J = qc.num_offline;
  const bool cacheable = cache != nullptr && T <= 64 && J <= 64;
  QcOutcome out;
  out.order = random_order(T, rng.order);
  MatchState s(J);
  std::uint64_t matched_mask = 0, done_mask = 0;

  for (std::size_t pos = 0; pos < out.order.size(); ++pos) {
    const int t = out.order[pos];
    const auto& nb = model.neighbors(t);
    std::vector<double> p(nb.size());
    for (std::size_t k = 0; k < nb.size(); ++k) p[k] = qc.p[t][nb[k]];

    const ProbePlan* plan = nullptr;
    ProbePlan local;
    std::vector<double> x;
    const ProbePlanCache::Key key{t, matched_mask, done_mask};
    if (cacheable) plan = cache->find(key);
    if (plan == nullptr) {
      x = next_vertex_probabilities(model, s, t);
      local = vertex_decomposition(x, p);
      auto m = local.marginals(p);
      for (std::size_t k = 0; k < x.size(); ++k)
        out.max_marginal_error = std::max(out.max_marginal_error, std::abs(m[k] - x[k]));
      plan = cacheable ? &cache->insert(key, std::move(local)) : &local;
    }

    // sample a vertex of the mixture
    const double u = rng.choice.uniform_at(static_cast<std::uint64_t>(t));
    std::size_t r = 0;
    double acc = 0;
    for (; r + 1 < plan->vertices.size(); ++r) {
      acc += plan->vertices[r].lambda;
      if (u < acc) break;
    }
    const auto& order = plan->vertices.empty() ? std::vector<int>{} : plan->vertices[r].order;

    std::vector<char> probed(nb.size(), 0);
    int committed = -1;
    for (int k : order) {
      const int j = nb[k];
      probed[k] = 1;
      const bool present = rng.arrival.uniform_at(static_cast<std::uint64_t>(t) * J + j) < p[k];
      out.probes.push_back({t, j, false, present, present});
      if (present) {
        committed = j;
        break;
      }
    }
    // Edges past the commit point or off the order: the algorithm's own coin.
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (probed[k]) continue;
      const bool present = rng.probe.uniform_at(static_cast<std::uint64_t>(t) * J + nb[k]) < p[k];
      out.probes.push_back({t, nb[k], true, present, false});
    }
    if (committed >= 0) {
      s.matched[committed] = 1;
      if (J <= 64) matched_mask |= std::uint64_t{1} << committed;
      out.matching.push_back({t, kNoArrival, committed});
    }
    advance(s, model.plan().y_step[t]);
    if (T <= 64) done_mask |= std::uint64_t{1} << t;
  }
  return out;
}

QcOutcome run_query_commit(const QueryCommitInstance& qc, std::uint64_t seed, std::uint64_t trial) {
  QcModel model(qc);
  TrialRng rng(seed, trial);
  return run_query_commit(model, rng);
}

double matched_value(const QueryCommitInstance& qc, const Matching& m) {
  std::vector<char> seen(qc.num_offline, 0);
  double v = 0;
  for (const auto& e : m) {
    if (e.agent < 0 || e.agent >= qc.num_offline) throw InvalidInput("matched_value: unknown offline vertex");
    if (seen[e.agent]) throw InvalidInput("matched_value: offline vertex matched twice");
    seen[e.agent] = 1;
    v += qc.w(e.agent);
  }
  return v;
}

}  // namespace socs
