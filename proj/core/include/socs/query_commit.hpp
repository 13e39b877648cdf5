#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <tuple>
#include <vector>

#include "socs/instance.hpp"
#include "socs/lp.hpp"
#include "socs/matching.hpp"
#include "socs/rng.hpp"
#include "socs/type_decomposition.hpp"

namespace socs {

inline constexpr int kProbeNeighborCap = 6;

// One polytope vertex: probe the listed neighbors (local indices) in order.
struct ProbeVertex {
  std::vector<int> order;
  double lambda = 0.0;
};

struct ProbePlan {
  std::vector<ProbeVertex> vertices;
  // sum_r lambda_r * point(order_r, p)
  std::vector<double> marginals(const std::vector<double>& p) const;
};

// x_{j1} = p_{j1}, x_{j2} = (1 - p_{j1}) p_{j2}, ...; zero off the order.
std::vector<double> vertex_point(const std::vector<int>& order, const std::vector<double>& p);

// Largest violation of sum_{j in S} x_j <= 1 - prod_{j in S} (1 - p_j) over all
// subsets S, and of x >= 0. Non-positive means x is in the polytope.
double probe_polytope_violation(const std::vector<double>& x, const std::vector<double>& p);

// Mixture of vertices reproducing x, from a feasibility LP over all ordered
// subsets of the neighbors with x_j > 0.
ProbePlan vertex_decomposition(const std::vector<double>& x, const std::vector<double>& p, double tol = 1e-10);

// Random-order instance induced by a query-commit instance: step t is online
// vertex t, types are the nonempty realized neighborhoods.
class QcModel {
 public:
  explicit QcModel(const QueryCommitInstance& qc, const LpOptions& opt = {});
  QcModel(const QcModel&) = delete;
  QcModel& operator=(const QcModel&) = delete;

  const QueryCommitInstance& qc() const { return qc_; }
  const Instance& induced() const { return induced_; }
  const FractionalAllocation& allocation() const { return x_; }
  const LpSolveReport& lp_report() const { return lp_; }
  const MatchingPlan& plan() const { return *plan_; }
  // Offline vertices with p > 0, ascending.
  const std::vector<int>& neighbors(int t) const { return nbr_[t]; }
  // Induced type index for neighborhood bitmask (over neighbors(t)); -1 for empty.
  int type_of(int t, unsigned mask) const { return type_[t][mask]; }
  const std::vector<SurrogateOutcome>& surrogates(int t, unsigned mask) const { return dist_[t][mask]; }

 private:
  QueryCommitInstance qc_;
  Instance induced_;
  FractionalAllocation x_;
  LpSolveReport lp_;
  std::unique_ptr<MatchingPlan> plan_;
  std::vector<std::vector<int>> nbr_;
  std::vector<std::vector<int>> type_;
  std::vector<std::vector<std::vector<SurrogateOutcome>>> dist_;
};

// Conditional probability that the random-order SOCS matches online vertex t
// to each of neighbors(t), given state s (matched set and y so far).
std::vector<double> next_vertex_probabilities(const QcModel& model, const MatchState& s, int t);

struct QcProbe {
  int online = 0;
  int offline = 0;
  bool simulated = false;  // algorithm's own Bernoulli(p) instead of nature's edge
  bool present = false;
  bool committed = false;
};

struct QcOutcome {
  Matching matching;  // type field is kNoArrival
  std::vector<QcProbe> probes;
  std::vector<int> order;            // online vertices in processing order
  double max_marginal_error = 0.0;   // |mixture marginal - x| over all processed vertices
};

// Probe plans memoized by (online vertex, matched agents, processed steps).
class ProbePlanCache {
 public:
  using Key = std::tuple<int, std::uint64_t, std::uint64_t>;
  const ProbePlan* find(const Key& k) const;
  const ProbePlan& insert(const Key& k, ProbePlan plan);
  std::size_t size() const { return plans_.size(); }

 private:
  std::map<Key, ProbePlan> plans_;
};

QcOutcome run_query_commit(const QcModel& model, TrialRng& rng, ProbePlanCache* cache = nullptr);
QcOutcome run_query_commit(const QueryCommitInstance& qc, std::uint64_t seed, std::uint64_t trial = 0);

double matched_value(const QueryCommitInstance& qc, const Matching& m);

}  // namespace socs
