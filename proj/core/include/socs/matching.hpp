#pragma once

#include <cstdint>
#include <vector>

#include "socs/instance.hpp"
#include "socs/rng.hpp"
#include "socs/type_decomposition.hpp"

namespace socs {

struct Match {
  int t = 0;     // original step index
  int type = 0;
  int agent = 0;
  bool operator==(const Match&) const = default;
};
using Matching = std::vector<Match>;

struct MatchState {
  std::vector<char> matched;
  std::vector<double> y;  // cumulative expected allocation over revealed steps
  int step = 0;

  explicit MatchState(int num_agents = 0) : matched(num_agents, 0), y(num_agents, 0.0) {}
  bool free(int j) const { return j == kBottom || !matched[j]; }
  double weight_exponent(int j) const { return j == kBottom ? 0.0 : 2.0 * y[j]; }
};

// Probability that the pair rule picks j over k when both are free.
double pair_selection_probability(const MatchState& s, int j, int k);

// Two-way SOCS step on pair {j, k} (either may be kBottom, a fresh dummy).
// Returns the selected real agent or -1. Does not touch y.
int step_two_way(MatchState& s, int j, int k, double u);
int step_two_way(MatchState& s, int j, int k, Rng& rng);

// Adds one step's expected allocation y_j^t to the state and advances the clock.
void advance(MatchState& s, const std::vector<double>& y_step);

// Precomputed per-(t,i) decompositions and per-step y increments.
struct MatchingPlan {
  const Instance* inst = nullptr;
  std::vector<Decomposer> decomposers;   // index t*I + i
  std::vector<std::vector<double>> y_step;  // [t][j]

  MatchingPlan(const Instance& inst, const FractionalAllocation& x);
  const Decomposer& at(int t, int i) const {
    return decomposers[static_cast<std::size_t>(t) * inst->num_types() + i];
  }
};

// Process step t with realized type i on state s. Randomness comes from
// rng.decompose / rng.choice at counter `slot`.
int matching_step(const MatchingPlan& plan, MatchState& s, int t, int i, TrialRng& rng, std::uint64_t slot);

Matching run_general(const MatchingPlan& plan, const ArrivalSequence& arrivals, TrialRng& rng);
Matching run_general(const Instance& inst, const FractionalAllocation& x, const ArrivalSequence& arrivals,
                     std::uint64_t seed, std::uint64_t trial = 0);

// Uniform order from i.i.d. theta keys; ties broken by step index.
std::vector<int> random_order(int T, Rng& rng);

// Samples arrivals and the order, then runs along the shuffled order.
Matching run_random_order(const MatchingPlan& plan, TrialRng& rng);
Matching run_random_order(const Instance& inst, const FractionalAllocation& x, std::uint64_t seed,
                          std::uint64_t trial = 0);

double matched_value(const Instance& inst, const Matching& m);

}  // namespace socs
