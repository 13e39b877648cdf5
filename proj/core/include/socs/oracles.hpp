#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "socs/instance.hpp"
#include "socs/rates.hpp"
#include "socs/type_decomposition.hpp"

namespace socs {

// Arrival masses of surrogate types per step, aggregated over original types.
struct TwoWayInstance {
  int J = 0;
  std::vector<std::vector<SurrogateOutcome>> steps;  // [t] -> (surrogate type, mass)
  int T() const { return static_cast<int>(steps.size()); }
  // y_j^t = f_{j} + 1/2 sum_k f_{jk}
  std::vector<double> y_step(int t) const;
  bool pure_two_way() const;  // no one-way mass on real agents
};

// Random pair arrivals: 1 to 3 surrogate types per step with total mass in
// [0.3, 1]; a share of them one-way, about 15% of pairs with the dummy.
TwoWayInstance random_two_way(int J, int T, std::uint64_t seed, double one_way_share = 0.0);

TwoWayInstance surrogate_instance(const Instance& inst, const FractionalAllocation& x);

// Instance with one type per surrogate pair, mu = (1/2, 1/2) or (1/2 on j, 1/2 residual);
// one-way mass becomes a singleton type with mu_j = 1.
std::pair<Instance, FractionalAllocation> realize_two_way(const TwoWayInstance& tw);

inline constexpr int kRecurrenceAgentCap = 16;

// u_S^t, t = 0..T, S a bitmask over J agents.
struct SubsetTable {
  int J = 0, T = 0;
  std::vector<double> u;  // index t * 2^J + S
  double at(int t, unsigned s) const { return u[(static_cast<std::size_t>(t) << J) + s]; }
  double singleton(int t, int j) const { return at(t, 1u << j); }
  // rows "S,t,u"
  std::string to_csv() const;
};

SubsetTable recurrence_table(const TwoWayInstance& tw);

// Residual checks on a table: the recurrence itself, the AM-GM relaxation,
// the baseline bound e^{-sum y}, and (pure two-way only) the singleton rate.
std::vector<CheckResult> table_property_checks(const TwoWayInstance& tw, const SubsetTable& table);

enum class DpAlgorithm { GeneralMatching, RandomOrderMatching, GeneralAdWords, GeneralDisplay };
const char* to_string(DpAlgorithm a);

inline constexpr std::size_t kDpStateCap = 1000000;
inline constexpr int kRandomOrderDpCap = 7;

struct DpResult {
  // Matching: Pr[j unmatched]. AdWords: E[unspent budget fraction]. Display: Pr[j gets nothing].
  std::vector<double> unmatched;
  // Display only: [j][l] = Pr[no allocated edge with weight >= weight_levels(inst, j)[l]].
  std::vector<std::vector<double>> level_miss;
  std::size_t max_states = 0;
};

DpResult exact_state_dp(const Instance& inst, const FractionalAllocation& x, DpAlgorithm alg,
                        std::size_t state_cap = kDpStateCap);

struct ConverseJensen {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

inline constexpr double kConverseJensenTol = 1e-10;

ConverseJensen converse_jensen_check(const Instance& inst, const FractionalAllocation& x,
                                     const std::vector<int>& types, int agent);

// Smallest rhs - lhs over agents and type subsets (all subsets when there are at
// most 10 types; else all types, singletons and weight-level sets).
double converse_jensen_sweep(const Instance& inst, const FractionalAllocation& x);

// One type adjacent to two agents, arriving w.p. 2y/T per step, split evenly.
std::pair<Instance, FractionalAllocation> tightness_instance(double y, int T);

}  // namespace socs
