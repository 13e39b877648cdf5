#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "socs/instance.hpp"

namespace socs {

// (t, i) pair; a subset S of T x I is a list of cells.
struct Cell {
  int t;
  int i;
  bool operator==(const Cell&) const = default;
};
using CellSet = std::vector<Cell>;

struct SubsetConstraint {
  int agent = 0;
  CellSet cells;
  double rhs = 0.0;
};

struct LpSolveReport {
  double objective = 0.0;
  long iterations = 0;  // simplex pivots summed over rounds
  int rounds = 0;       // cutting-plane rounds
  double max_violation = 0.0;
  bool converged = true;
  bool inconclusive = false;  // Monte Carlo v-bar left a violation inside its noise band
  std::vector<SubsetConstraint> active;  // subset rows that are tight at the optimum
};

struct Violation {
  CellSet cells;
  double amount = 0.0;  // lhs - rhs
  double rhs = 0.0;
};

inline constexpr int kSeparationCap = 22;
inline constexpr int kVbarExactCap = 20;

struct LpOptions {
  double tol = 1e-9;
  int separation_cap = kSeparationCap;
};

// RHS of the matching polymatroid constraint: 1 - prod_t (1 - sum_{i:(t,i) in S} f_i^t).
double matching_rhs(const Instance& inst, const CellSet& s);

std::pair<FractionalAllocation, LpSolveReport> solve_matching_lp(const Instance& inst,
                                                                 const LpOptions& opt = {});

// Most violated subset on the support of x for agent j, or nullopt when the
// worst violation is at most tol.
std::optional<Violation> matching_separation(const Instance& inst, const FractionalAllocation& x,
                                             int agent, double tol = 1e-9,
                                             int cap = kSeparationCap);

std::pair<FractionalAllocation, LpSolveReport> solve_adwords_fluid_lp(const Instance& inst,
                                                                      const LpOptions& opt = {});

enum class VbarMode { Exact, LargeBidsExact, MonteCarlo };
const char* to_string(VbarMode m);

struct VbarOptions {
  VbarMode mode = VbarMode::LargeBidsExact;
  int samples = 20000;  // MonteCarlo only
  std::uint64_t seed = 1;
};

struct VbarValue {
  double value = 0.0;
  double std_error = 0.0;  // 0 for the exact modes
};

bool is_large_bid(const Instance& inst, int i, int j);

// E[min(sum_{(t,i) in S} R_i^t b_ij, B_j)].
VbarValue evaluate_vbar(const Instance& inst, int agent, const CellSet& s, const VbarOptions& opt = {});

struct AdwordsLpOptions {
  double tol = 1e-9;
  int separation_cap = kSeparationCap;
  VbarOptions vbar;
};

std::optional<Violation> adwords_separation(const Instance& inst, const FractionalAllocation& x,
                                            int agent, double tol, const VbarOptions& vbar,
                                            int cap = kSeparationCap, bool* inconclusive = nullptr);

std::pair<FractionalAllocation, LpSolveReport> solve_adwords_lp(const Instance& inst,
                                                                const AdwordsLpOptions& opt = {});

// Objective of x under the instance's value model (linear, no budget cap).
double lp_objective(const Instance& inst, const FractionalAllocation& x);

// Re-audits non-negativity, per-(t,i) mass, and the class's subset family
// (polymatroid for matching classes; fluid + v-bar for AdWords).
LpSolveReport check_feasibility(const Instance& inst, const FractionalAllocation& x, double tol = 1e-9,
                                const VbarOptions& vbar = {});

}  // namespace socs
