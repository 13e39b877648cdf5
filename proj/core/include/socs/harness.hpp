#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "socs/adwords.hpp"
#include "socs/instance.hpp"
#include "socs/lp.hpp"
#include "socs/rates.hpp"

namespace socs {

enum class AlgorithmKind {
  TwoWayMatching,
  GeneralMatching,
  RandomOrderMatching,
  TwoWayAdWords,
  GeneralAdWords,
  MultiwayOcsAdWords,
  TwoWayDisplay,
  GeneralDisplay,
};

const char* to_string(AlgorithmKind k);
AlgorithmKind algorithm_kind_from_string(const std::string& s);
const std::vector<AlgorithmKind>& all_algorithm_kinds();
RateKind rate_kind_for(AlgorithmKind k);
// Problem class the algorithm runs on (AdWords for the multi-way OCS).
ProblemClass problem_class_for(AlgorithmKind k);

enum class Benchmark { LP, HindsightMC, ExactDP };
const char* to_string(Benchmark b);
Benchmark benchmark_from_string(const std::string& s);

inline constexpr double kWilsonZ99 = 2.5758293035489004;

struct Interval {
  double lo = 0.0, hi = 0.0;
};

// Wilson score interval for k successes out of n.
Interval wilson_interval(double successes, long n, double z = kWilsonZ99);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  Interval ci;  // 99%: Wilson for 0/1 outcomes, normal otherwise
};

// One rate-tracked quantity: agent j (and weight level, Display Ads only).
struct AgentStat {
  int agent = 0;
  double level = 0.0;  // 0 when not level-resolved
  double y = 0.0;
  Estimate miss;       // unmatched / unspent fraction / no edge >= level
  std::optional<double> exact;  // ExactDP benchmark only
};

struct StatSummary {
  AlgorithmKind algorithm = AlgorithmKind::GeneralMatching;
  Benchmark benchmark = Benchmark::LP;
  long trials = 0;
  std::uint64_t seed = 0;
  std::vector<AgentStat> agents;
  Estimate alg_value;
  double benchmark_value = 0.0;  // LP objective, exact E[ALG], or mean hindsight OPT
  Estimate ratio;                // ALG / benchmark
};

// Everything a Monte Carlo run needs besides the config knobs.
struct Experiment {
  Instance inst;
  FractionalAllocation x;
  double lp_value = 0.0;
  std::optional<AdversarialSequence> sequence;  // MultiwayOcsAdWords
};

// Solves the LP of the instance's class (matching LP, or AdWords LP with
// large-bid exact v-bar) and packages it.
Experiment prepare_experiment(const Instance& inst, const AdwordsLpOptions& opt = {});
Experiment prepare_experiment(const AdversarialSequence& seq);

struct ExperimentConfig {
  std::optional<std::string> instance_path;
  std::optional<GeneratorSpec> generator;
  AlgorithmKind algorithm = AlgorithmKind::GeneralMatching;
  long trials = 1000;
  std::uint64_t seed = 0;
  Benchmark benchmark = Benchmark::LP;
  std::string output_path;
  int threads = 0;  // 0: hardware concurrency
};

inline constexpr long kTrialBlock = 1024;

// Trials run in fixed blocks; blocks are folded in index order so the summary
// does not depend on the thread count.
StatSummary monte_carlo(const Experiment& e, AlgorithmKind alg, long trials, std::uint64_t seed,
                        Benchmark bench = Benchmark::LP, int threads = 0);
StatSummary monte_carlo(const ExperimentConfig& cfg);

struct RateVerdict {
  int agent = 0;
  double level = 0.0;
  double y = 0.0;
  double estimate = 0.0;
  double sigma = 0.0;
  double g = 0.0;
  double margin = 0.0;  // g - estimate
  bool skipped = false;  // y > 1
  bool pass = true;
};

inline constexpr double kRateSigmas = 3.0;

// PASS when estimate - 3 sigma <= g(y).
RateVerdict rate_verdict(double estimate, double sigma, double g);
std::vector<RateVerdict> compare_to_rate(const StatSummary& s, const RateCurve& g);
bool all_pass(const std::vector<RateVerdict>& v);

std::string to_csv(const StatSummary& s);
std::string to_csv(const std::vector<RateVerdict>& v);

}  // namespace socs
