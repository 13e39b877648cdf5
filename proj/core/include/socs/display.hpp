#pragma once

#include <cstdint>
#include <vector>

#include "socs/adwords.hpp"
#include "socs/instance.hpp"
#include "socs/matching.hpp"

namespace socs {

struct DisplayState {
  std::vector<double> best;  // max allocated edge-weight per agent (0 if none)
  MarkBook book;
  explicit DisplayState(int n = 0) : best(n, 0.0), book(n) {}
};

// Every two-way step is marked with the picked agent (dummy picks change nothing).
TwoWayTrace step_two_way_display(DisplayState& s, int j, int k, const std::vector<double>& weights, double u_pick,
                                 double u_choice);

struct DisplayOutcome {
  std::vector<Match> assignment;
  std::vector<double> value;  // per agent, max allocated weight
  std::vector<TwoWayTrace> trace;
  double total_value() const;
};

using DisplayPlan = MatchingPlan;

DisplayOutcome run_general_display(const DisplayPlan& plan, const ArrivalSequence& arrivals, TrialRng& rng,
                                   bool keep_trace = false);
DisplayOutcome run_general_display(const Instance& inst, const FractionalAllocation& x,
                                   const ArrivalSequence& arrivals, std::uint64_t seed, std::uint64_t trial = 0);

struct LevelFlag {
  double level = 0.0;
  bool covered = false;  // got an allocated edge with weight >= level
};

// Distinct positive weights of agent j's edges, ascending.
std::vector<double> weight_levels(const Instance& inst, int agent);

std::vector<LevelFlag> value_profile(const Instance& inst, const std::vector<Match>& assignment, int agent);

// Sum over consecutive levels of width x flag; equals the max allocated weight.
double value_from_profile(const std::vector<LevelFlag>& profile);

}  // namespace socs
