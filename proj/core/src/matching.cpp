#include "socs/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "socs/error.hpp"

namespace socs {

double pair_selection_probability(const MatchState& s, int j, int k) {
  return 1.0 / (1.0 + std::exp(s.weight_exponent(k) - s.weight_exponent(j)));
}

int step_two_way(MatchState& s, int j, int k, double u) {
  const int n = static_cast<int>(s.matched.size());
  if (j >= n || k >= n || j < kBottom || k < kBottom) throw InvalidInput("step_two_way: unknown agent");
  const bool fj = s.free(j), fk = s.free(k);
  int pick = -1;
  if (fj && fk) pick = u < pair_selection_probability(s, j, k) ? j : k;
  else if (fj) pick = j;
  else if (fk) pick = k;
  if (pick == kBottom) return -1;
  if (pick >= 0) s.matched[pick] = 1;
  return pick;
}

int step_two_way(MatchState& s, int j, int k, Rng& rng) { return step_two_way(s, j, k, rng.uniform()); }

void advance(MatchState& s, const std::vector<double>& y_step) {
  for (std::size_t j = 0; j < s.y.size(); ++j) s.y[j] += y_step[j];
  ++s.step;
}

MatchingPlan::MatchingPlan(const Instance& in, const FractionalAllocation& x) : inst(&in) {
  if (!x.matches(in)) throw InvalidInput("allocation does not match instance");
  decomposers.reserve(static_cast<std::size_t>(in.T) * in.num_types());
  y_step.assign(in.T, std::vector<double>(in.num_agents(), 0.0));
  for (int t = 0; t < in.T; ++t)
    for (int i = 0; i < in.num_types(); ++i) {
      decomposers.emplace_back(x.mu(in, t, i));
      for (int j = 0; j < in.num_agents(); ++j) y_step[t][j] += x.at(t, i, j) * in.y_scale(i, j);
    }
}

int matching_step(const MatchingPlan& plan, MatchState& s, int t, int i, TrialRng& rng, std::uint64_t slot) {
  if (i == kNoArrival) return -1;
  const SurrogateType st = plan.at(t, i).sample(0.5 * rng.decompose.uniform_at(slot));
  if (!st.two_way) {
    if (st.a == kBottom || s.matched[st.a]) return -1;
    s.matched[st.a] = 1;
    return st.a;
  }
  return step_two_way(s, st.a, st.b, rng.choice.uniform_at(slot));
}

Matching run_general(const MatchingPlan& plan, const ArrivalSequence& arr, TrialRng& rng) {
  const Instance& in = *plan.inst;
  if (static_cast<int>(arr.types.size()) != in.T) throw InvalidInput("run_general: arrival length differs from T");
  MatchState s(in.num_agents());
  Matching m;
  for (int t = 0; t < in.T; ++t) {
    const int i = arr.types[t];
    const int j = matching_step(plan, s, t, i, rng, static_cast<std::uint64_t>(t));
    if (j >= 0) m.push_back({t, i, j});
    advance(s, plan.y_step[t]);
  }
  return m;
}

Matching run_general(const Instance& in, const FractionalAllocation& x, const ArrivalSequence& arr,
                     std::uint64_t seed, std::uint64_t trial) {
  MatchingPlan plan(in, x);
  TrialRng rng(seed, trial);
  return run_general(plan, arr, rng);
}

std::vector<int> random_order(int T, Rng& rng) {
  std::vector<double> theta(T);
  for (int t = 0; t < T; ++t) theta[t] = rng.uniform_at(static_cast<std::uint64_t>(t));
  std::vector<int> order(T);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return theta[a] < theta[b]; });
  return order;
}

Matching run_random_order(const MatchingPlan& plan, TrialRng& rng) {
  const Instance& in = *plan.inst;
  auto arr = sample_arrivals(in, rng.arrival);
  auto order = random_order(in.T, rng.order);
  MatchState s(in.num_agents());
  Matching m;
  for (int t : order) {
    const int i = arr.types[t];
    const int j = matching_step(plan, s, t, i, rng, static_cast<std::uint64_t>(t));
    if (j >= 0) m.push_back({t, i, j});
    advance(s, plan.y_step[t]);
  }
  return m;
}

Matching run_random_order(const Instance& in, const FractionalAllocation& x, std::uint64_t seed,
                          std::uint64_t trial) {
  MatchingPlan plan(in, x);
  TrialRng rng(seed, trial);
  return run_random_order(plan, rng);
}

double matched_value(const Instance& in, const Matching& m) {
  std::vector<char> seen(in.num_agents(), 0);
  double v = 0;
  for (const auto& e : m) {
    if (e.agent < 0 || e.agent >= in.num_agents()) throw InvalidInput("matched_value: unknown agent");
    if (seen[e.agent]) throw InvalidInput("matched_value: agent matched twice");
    seen[e.agent] = 1;
    v += in.problem == ProblemClass::VertexWeighted ? in.agent_weight[e.agent] : 1.0;
  }
  return v;
}

}  // namespace socs
