#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "socs/rng.hpp"

namespace socs {

enum class ProblemClass { Unweighted, VertexWeighted, AdWords, DisplayAds };

const char* to_string(ProblemClass c);
ProblemClass problem_class_from_string(const std::string& s);

inline constexpr int kNoArrival = -1;
inline constexpr double kProbTol = 1e-12;

// Non-IID instance. Online type i at step t is keyed by (t, i); the same type
// id at different steps is a different (t, i) pair.
struct Instance {
  ProblemClass problem = ProblemClass::Unweighted;
  int T = 0;
  std::vector<std::string> agent_ids;
  std::vector<double> agent_weight;  // w_j, VertexWeighted only
  std::vector<double> budget;        // B_j, AdWords only
  std::vector<std::string> type_ids;
  // value[i][j]: edge indicator (0/1) for the matching classes, bid b_ij for
  // AdWords, edge-weight w_ij for DisplayAds.
  std::vector<std::vector<double>> value;
  // prob[t][i] = f_i^t; the remaining mass at step t is "no arrival".
  std::vector<std::vector<double>> prob;

  int num_agents() const { return static_cast<int>(agent_ids.size()); }
  int num_types() const { return static_cast<int>(type_ids.size()); }
  bool adjacent(int i, int j) const { return value[i][j] > 0.0; }
  // Objective coefficient of one unit of x_ij.
  double gain(int i, int j) const;
  // Contribution of one unit of x_ij to y_j (b_ij/B_j for AdWords, else 1).
  double y_scale(int i, int j) const;
  bool is_matching() const {
    return problem == ProblemClass::Unweighted || problem == ProblemClass::VertexWeighted;
  }
  int agent_index(const std::string& id) const;
};

struct ArrivalSequence {
  std::vector<int> types;  // length T, entries type index or kNoArrival
};

struct QueryCommitInstance {
  int num_online = 0;
  int num_offline = 0;
  std::vector<std::vector<double>> p;  // p[i][j]
  std::vector<double> weight;          // per offline vertex; empty means unit
  double w(int j) const { return weight.empty() ? 1.0 : weight[j]; }
};

// x_ij^t stored densely as x[(t*I + i)*J + j].
struct FractionalAllocation {
  int T = 0, I = 0, J = 0;
  std::vector<double> x;

  static FractionalAllocation zeros(const Instance& inst);
  double& at(int t, int i, int j) { return x[(static_cast<std::size_t>(t) * I + i) * J + j]; }
  double at(int t, int i, int j) const { return x[(static_cast<std::size_t>(t) * I + i) * J + j]; }
  const double* row(int t, int i) const { return &x[(static_cast<std::size_t>(t) * I + i) * J]; }
  // mu_ij^t = x/f, 0 where f = 0
  std::vector<double> mu(const Instance& inst, int t, int i) const;
  bool matches(const Instance& inst) const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const Instance& inst);
ValidationReport validate(const QueryCommitInstance& qc);

ArrivalSequence sample_arrivals(const Instance& inst, Rng& rng);
ArrivalSequence sample_arrivals(const Instance& inst, std::uint64_t seed, std::uint64_t trial = 0);

// y_j over steps [t_begin, t_end). With weight_level set (DisplayAds) only
// types with w_ij >= level count.
double cumulative_allocation_between(const Instance& inst, const FractionalAllocation& x, int agent,
                                     int t_begin, int t_end,
                                     std::optional<double> weight_level = std::nullopt);
// y_j^{1:horizon}; horizon < 0 means T.
double cumulative_allocation(const Instance& inst, const FractionalAllocation& x, int agent,
                             int horizon = -1,
                             std::optional<double> weight_level = std::nullopt);

inline constexpr int kAdWordsBruteForceCap = 14;

double hindsight_optimum(const Instance& inst, const ArrivalSequence& arrivals);

struct GeneratorSpec {
  ProblemClass problem = ProblemClass::Unweighted;
  int num_types = 1;
  int num_agents = 1;
  int T = 1;
  double density = 0.5;
  std::uint64_t seed = 0;
};

Instance generate(const GeneratorSpec& spec);

QueryCommitInstance generate_query_commit(int num_online, int num_offline, double density,
                                          std::uint64_t seed, bool weighted = false);

}  // namespace socs
