#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "socs/instance.hpp"
#include "socs/matching.hpp"
#include "socs/rng.hpp"
#include "socs/type_decomposition.hpp"

namespace socs {

inline constexpr int kNoMark = -2;

// Mark bookkeeping shared by the AdWords and Display Ads two-way steps.
struct MarkBook {
  std::vector<int> marks;            // number of steps marked with each agent
  std::vector<signed char> first_selected;  // at the first mark: 1 if the agent was selected, -1 unset
  explicit MarkBook(int n = 0) : marks(n, 0), first_selected(n, -1) {}
};

struct TwoWayTrace {
  int t = 0;
  int j = 0, k = 0;  // pair (k may be kBottom)
  int mark = kNoMark;  // agent marked with, or kNoMark
  int mark_index = 0;  // 1 for the agent's first mark, 2 for its second, ...
  bool forced = false;  // opposite selection applied
  int selected = -1;    // real agent selected, or -1 for the dummy
};

// One mark-and-oppose step on the pair {j, k}. `markable(m)` tells whether a
// step picking m is marked; it must be false for kBottom (a fresh dummy is
// never marked twice, so marking it changes nothing). u_pick picks m, u_choice is the uniform choice.
template <class Markable>
TwoWayTrace mark_and_oppose(MarkBook& book, int j, int k, Markable&& markable, double u_pick, double u_choice) {
  TwoWayTrace tr;
  tr.j = j;
  tr.k = k;
  const int m = u_pick < 0.5 ? j : k;
  if (markable(m)) tr.mark = m;
  int sel;
  if (tr.mark >= 0) {
    tr.mark_index = ++book.marks[m];
    const int other = m == j ? k : j;
    if (tr.mark_index == 2) {
      sel = book.first_selected[m] == 1 ? other : m;
      tr.forced = true;
    } else {
      sel = u_choice < 0.5 ? j : k;
    }
    if (tr.mark_index == 1) book.first_selected[m] = sel == m ? 1 : 0;
  } else {
    sel = u_choice < 0.5 ? j : k;
  }
  tr.selected = sel;
  return tr;
}

struct AdWordsState {
  std::vector<double> budget;
  std::vector<double> spent;  // uncapped sum of allocated bids
  std::vector<double> y;
  MarkBook book;
  explicit AdWordsState(const std::vector<double>& budgets)
      : budget(budgets), spent(budgets.size(), 0.0), y(budgets.size(), 0.0), book(static_cast<int>(budgets.size())) {}
  double value(int j) const { return std::min(spent[j], budget[j]); }
  bool large(int j, double bid) const { return j >= 0 && bid >= (2.0 / 3.0) * budget[j]; }
};

// Two-way AdWords step for type value row `bids` (b_i, indexed by agent).
TwoWayTrace step_two_way_adwords(AdWordsState& s, int j, int k, const std::vector<double>& bids, double u_pick,
                                 double u_choice);

struct AdWordsOutcome {
  std::vector<Match> assignment;
  std::vector<double> spent;  // uncapped
  std::vector<double> value;  // min(spent, B)
  std::vector<TwoWayTrace> trace;
  double total_value() const;
};

struct AdWordsPlan {
  const Instance* inst = nullptr;
  MatchingPlan base;
  AdWordsPlan(const Instance& inst, const FractionalAllocation& x);
};

AdWordsOutcome run_general_adwords(const AdWordsPlan& plan, const ArrivalSequence& arrivals, TrialRng& rng,
                                   bool keep_trace = false);
AdWordsOutcome run_general_adwords(const Instance& inst, const FractionalAllocation& x,
                                   const ArrivalSequence& arrivals, std::uint64_t seed, std::uint64_t trial = 0);

// Adversarial AdWords input: bids b_j^t and (optionally) allocations mu_j^t.
struct AdversarialSequence {
  std::vector<std::string> agent_ids;
  std::vector<double> budget;
  std::vector<std::vector<double>> bids;  // [t][j]
  std::vector<std::vector<double>> mu;    // [t][j], may be empty
  int T() const { return static_cast<int>(bids.size()); }
  int num_agents() const { return static_cast<int>(budget.size()); }
};

// y_j = sum_t mu_j^t b_j^t / B_j
std::vector<double> adversarial_y(const AdversarialSequence& seq);

struct OcsOutcome {
  std::vector<int> assignment;  // per step: agent or -1
  std::vector<double> spent;
  std::vector<double> value;
  std::vector<TwoWayTrace> trace;
  double total_value() const;
};

// Type Decomposition on mu^t, then the two-way AdWords step.
OcsOutcome run_multiway_ocs_adwords(const AdversarialSequence& seq, TrialRng& rng, bool keep_trace = false);
OcsOutcome run_multiway_ocs_adwords(const AdversarialSequence& seq, std::uint64_t seed, std::uint64_t trial = 0);

// Offline optimum of an adversarial sequence (brute force, <= 14 items).
double adversarial_optimum(const AdversarialSequence& seq);

}  // namespace socs
