#include "socs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "socs/display.hpp"
#include "socs/error.hpp"
#include "socs/json_io.hpp"
#include "socs/matching.hpp"
#include "socs/oracles.hpp"

namespace socs {

const char* to_string(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::TwoWayMatching: return "TwoWayMatching";
    case AlgorithmKind::GeneralMatching: return "GeneralMatching";
    case AlgorithmKind::RandomOrderMatching: return "RandomOrderMatching";
    case AlgorithmKind::TwoWayAdWords: return "TwoWayAdWords";
    case AlgorithmKind::GeneralAdWords: return "GeneralAdWords";
    case AlgorithmKind::MultiwayOcsAdWords: return "MultiwayOcsAdWords";
    case AlgorithmKind::TwoWayDisplay: return "TwoWayDisplay";
    case AlgorithmKind::GeneralDisplay: return "GeneralDisplay";
  }
  return "?";
}

const std::vector<AlgorithmKind>& all_algorithm_kinds() {
  static const std::vector<AlgorithmKind> v{
      AlgorithmKind::TwoWayMatching, AlgorithmKind::GeneralMatching,    AlgorithmKind::RandomOrderMatching,
      AlgorithmKind::TwoWayAdWords,  AlgorithmKind::GeneralAdWords,     AlgorithmKind::MultiwayOcsAdWords,
      AlgorithmKind::TwoWayDisplay,  AlgorithmKind::GeneralDisplay};
  return v;
}

AlgorithmKind algorithm_kind_from_string(const std::string& s) {
  for (auto k : all_algorithm_kinds())
    if (s == to_string(k)) return k;
  throw InvalidInput("unknown algorithm kind '" + s + "'");
}

RateKind rate_kind_for(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::TwoWayMatching: return RateKind::TwoWayMatching;
    case AlgorithmKind::GeneralMatching: return RateKind::GeneralMatching;
    case AlgorithmKind::RandomOrderMatching: return RateKind::RandomOrderMatching;
    case AlgorithmKind::TwoWayAdWords: return RateKind::TwoWayAdWords;
    case AlgorithmKind::GeneralAdWords: return RateKind::GeneralAdWords;
    case AlgorithmKind::MultiwayOcsAdWords: return RateKind::MultiwayOcsAdWords;
    case AlgorithmKind::TwoWayDisplay: return RateKind::TwoWayDisplay;
    case AlgorithmKind::GeneralDisplay: return RateKind::GeneralDisplay;
  }
  return RateKind::Baseline;
}

ProblemClass problem_class_for(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::TwoWayAdWords:
    case AlgorithmKind::GeneralAdWords:
    case AlgorithmKind::MultiwayOcsAdWords: return ProblemClass::AdWords;
    case AlgorithmKind::TwoWayDisplay:
    case AlgorithmKind::GeneralDisplay: return ProblemClass::DisplayAds;
    default: return ProblemClass::VertexWeighted;
  }
}

const char* to_string(Benchmark b) {
  switch (b) {
    case Benchmark::LP: return "LP";
    case Benchmark::HindsightMC: return "HindsightMC";
    case Benchmark::ExactDP: return "ExactDP";
  }
  return "?";
}

Benchmark benchmark_from_string(const std::string& s) {
  for (auto b : {Benchmark::LP, Benchmark::HindsightMC, Benchmark::ExactDP})
    if (s == to_string(b)) return b;
  throw InvalidInput("unknown benchmark '" + s + "'");
}

Interval wilson_interval(double k, long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n), p = k / nn, z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Experiment prepare_experiment(const Instance& inst, const AdwordsLpOptions& opt) {
  auto rep = validate(inst);
  if (!rep.ok()) throw InvalidInput(rep.violations.front());
  Experiment e;
  e.inst = inst;
  LpSolveReport r;
  if (inst.problem == ProblemClass::AdWords) std::tie(e.x, r) = solve_adwords_lp(inst, opt);
  else std::tie(e.x, r) = solve_matching_lp(inst, {opt.tol, opt.separation_cap});
  e.lp_value = r.objective;
  return e;
}

Experiment prepare_experiment(const AdversarialSequence& seq) {
  Experiment e;
  Instance& in = e.inst;
  in.problem = ProblemClass::AdWords;
  in.T = seq.T();
  in.agent_ids = seq.agent_ids;
  if (in.agent_ids.empty())
    for (int j = 0; j < seq.num_agents(); ++j) in.agent_ids.push_back(std::to_string(j));
  in.budget = seq.budget;
  for (int t = 0; t < seq.T(); ++t) {
    in.type_ids.push_back("t" + std::to_string(t));
    in.value.push_back(seq.bids[t]);
  }
  in.prob.assign(in.T, std::vector<double>(in.T, 0.0));
  for (int t = 0; t < in.T; ++t) in.prob[t][t] = 1.0;
  e.x = FractionalAllocation::zeros(in);
  for (int t = 0; t < in.T; ++t)
    for (int j = 0; j < seq.num_agents(); ++j) e.x.at(t, t, j) = seq.mu[t][j];
  e.lp_value = adversarial_optimum(seq);
  e.sequence = seq;
  return e;
}

namespace {

bool is_two_way(AlgorithmKind k) {
  return k == AlgorithmKind::TwoWayMatching || k == AlgorithmKind::TwoWayAdWords || k == AlgorithmKind::TwoWayDisplay;
}

struct Row {
  int agent;
  double level;
};

std::vector<Row> stat_rows(const Instance& in) {
  std::vector<Row> rows;
  for (int j = 0; j < in.num_agents(); ++j) {
    if (in.problem == ProblemClass::DisplayAds)
      for (double w : weight_levels(in, j)) rows.push_back({j, w});
    else
      rows.push_back({j, 0.0});
  }
  return rows;
}

struct Acc {
  std::vector<double> miss, miss2;
  double a = 0, a2 = 0, o = 0, o2 = 0, ao = 0;
  explicit Acc(std::size_t k = 0) : miss(k, 0.0), miss2(k, 0.0) {}
  void add(const Acc& b) {
    for (std::size_t r = 0; r < miss.size(); ++r) {
      miss[r] += b.miss[r];
      miss2[r] += b.miss2[r];
    }
    a += b.a;
    a2 += b.a2;
    o += b.o;
    o2 += b.o2;
    ao += b.ao;
  }
};

class TrialRunner {
 public:
  TrialRunner(const Experiment& e, AlgorithmKind alg, Benchmark bench)
      : e_(e), alg_(alg), bench_(bench), rows_(stat_rows(e.inst)), plan_(e.inst, e.x) {
    if (e.inst.problem == ProblemClass::AdWords) adwords_.emplace(e.inst, e.x);
  }

  const std::vector<Row>& rows() const { return rows_; }

  void run(std::uint64_t seed, std::uint64_t trial, Acc& acc) const {
    const Instance& in = e_.inst;
    TrialRng rng(seed, trial);
    std::vector<double> miss(rows_.size(), 0.0);
    double value = 0;
    ArrivalSequence arr;
    switch (alg_) {
      case AlgorithmKind::TwoWayMatching:
      case AlgorithmKind::GeneralMatching:
      case AlgorithmKind::RandomOrderMatching: {
        Matching m;
        if (alg_ == AlgorithmKind::RandomOrderMatching) {
          m = run_random_order(plan_, rng);
          if (bench_ == Benchmark::HindsightMC) {
            Rng replay(seed, trial, Stream::Arrival);
            arr = sample_arrivals(in, replay);
          }
        } else {
          arr = sample_arrivals(in, rng.arrival);
          m = run_general(plan_, arr, rng);
        }
        std::vector<char> matched(in.num_agents(), 0);
        for (const auto& e : m) matched[e.agent] = 1;
        for (std::size_t r = 0; r < rows_.size(); ++r) miss[r] = matched[rows_[r].agent] ? 0.0 : 1.0;
        value = matched_value(in, m);
        break;
      }
      case AlgorithmKind::TwoWayAdWords:
      case AlgorithmKind::GeneralAdWords: {
        arr = sample_arrivals(in, rng.arrival);
        auto out = run_general_adwords(*adwords_, arr, rng);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
          const int j = rows_[r].agent;
          miss[r] = (in.budget[j] - out.value[j]) / in.budget[j];
        }
        value = out.total_value();
        break;
      }
      case AlgorithmKind::MultiwayOcsAdWords: {
        auto out = run_multiway_ocs_adwords(*e_.sequence, rng);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
          const int j = rows_[r].agent;
          miss[r] = (in.budget[j] - out.value[j]) / in.budget[j];
        }
        value = out.total_value();
        break;
      }
      case AlgorithmKind::TwoWayDisplay:
      case AlgorithmKind::GeneralDisplay: {
        arr = sample_arrivals(in, rng.arrival);
        auto out = run_general_display(plan_, arr, rng);
        for (std::size_t r = 0; r < rows_.size(); ++r) miss[r] = out.value[rows_[r].agent] < rows_[r].level ? 1.0 : 0.0;
        value = out.total_value();
        break;
      }
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      acc.miss[r] += miss[r];
      acc.miss2[r] += miss[r] * miss[r];
    }
    acc.a += value;
    acc.a2 += value * value;
    if (bench_ == Benchmark::HindsightMC) {
      const double opt = alg_ == AlgorithmKind::MultiwayOcsAdWords ? e_.lp_value : hindsight_optimum(in, arr);
      acc.o += opt;
      acc.o2 += opt * opt;
      acc.ao += value * opt;
    }
  }

 private:
  const Experiment& e_;
  AlgorithmKind alg_;
  Benchmark bench_;
  std::vector<Row> rows_;
  MatchingPlan plan_;
  std::optional<AdWordsPlan> adwords_;
};

Estimate mean_estimate(double sum, double sum2, long n, bool bernoulli) {
  Estimate e;
  const double nn = static_cast<double>(n);
  e.mean = sum / nn;
  const double var = std::max(0.0, sum2 / nn - e.mean * e.mean);
  e.std_error = std::sqrt(var / nn);
  if (bernoulli) e.ci = wilson_interval(sum, n);
  else e.ci = {e.mean - kWilsonZ99 * e.std_error, e.mean + kWilsonZ99 * e.std_error};
  return e;
}

double exact_expected_value(const Instance& in, const DpResult& d) {
  double v = 0;
  for (int j = 0; j < in.num_agents(); ++j) {
    switch (in.problem) {
      case ProblemClass::Unweighted: v += 1.0 - d.unmatched[j]; break;
      case ProblemClass::VertexWeighted: v += in.agent_weight[j] * (1.0 - d.unmatched[j]); break;
      case ProblemClass::AdWords: v += in.budget[j] * (1.0 - d.unmatched[j]); break;
      case ProblemClass::DisplayAds: {
        double prev = 0;
        const auto lv = weight_levels(in, j);
        for (std::size_t l = 0; l < lv.size(); ++l) {
          v += (lv[l] - prev) * (1.0 - d.level_miss[j][l]);
          prev = lv[l];
        }
      }
    }
  }
  return v;
}

DpAlgorithm dp_algorithm_for(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::RandomOrderMatching: return DpAlgorithm::RandomOrderMatching;
    case AlgorithmKind::TwoWayAdWords:
    case AlgorithmKind::GeneralAdWords:
    case AlgorithmKind::MultiwayOcsAdWords: return DpAlgorithm::GeneralAdWords;
    case AlgorithmKind::TwoWayDisplay:
    case AlgorithmKind::GeneralDisplay: return DpAlgorithm::GeneralDisplay;
    default: return DpAlgorithm::GeneralMatching;
  }
}

}  // namespace

StatSummary monte_carlo(const Experiment& e, AlgorithmKind alg, long trials, std::uint64_t seed, Benchmark bench,
                        int threads) {
  if (trials < 1) throw InvalidInput("trial count must be at least 1");
  const Instance& in = e.inst;
  const ProblemClass want = problem_class_for(alg);
  const bool class_ok = want == ProblemClass::VertexWeighted ? in.is_matching() : in.problem == want;
  if (!class_ok) throw InvalidInput(std::string(to_string(alg)) + " does not run on " + to_string(in.problem));
  if (alg == AlgorithmKind::MultiwayOcsAdWords && !e.sequence)
    throw InvalidInput("MultiwayOcsAdWords needs an adversarial sequence");
  if (is_two_way(alg) && !surrogate_instance(in, e.x).pure_two_way())
    throw InvalidInput(std::string(to_string(alg)) + " needs an allocation without one-way surrogate mass");

  TrialRunner runner(e, alg, bench);
  const auto& rows = runner.rows();
  const long blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<Acc> part(blocks, Acc(rows.size()));
  int nt = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nt = static_cast<int>(std::min<long>(nt, blocks));
  auto work = [&](int w) {
    for (long b = w; b < blocks; b += nt) {
      const long lo = b * kTrialBlock, hi = std::min(trials, lo + kTrialBlock);
      for (long t = lo; t < hi; ++t) runner.run(seed, static_cast<std::uint64_t>(t), part[b]);
    }
  };
  if (nt <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex mu;
    for (int w = 0; w < nt; ++w)
      pool.emplace_back([&, w] {
        try {
          work(w);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  Acc tot(rows.size());
  for (const auto& p : part) tot.add(p);

  StatSummary s;
  s.algorithm = alg;
  s.benchmark = bench;
  s.trials = trials;
  s.seed = seed;
  const bool bernoulli = want != ProblemClass::AdWords;
  std::vector<double> y_adv;
  if (e.sequence) y_adv = adversarial_y(*e.sequence);
  std::optional<DpResult> dp;
  if (bench == Benchmark::ExactDP) dp = exact_state_dp(in, e.x, dp_algorithm_for(alg));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    AgentStat a;
    a.agent = rows[r].agent;
    a.level = rows[r].level;
    if (e.sequence) a.y = y_adv[a.agent];
    else if (in.problem == ProblemClass::DisplayAds) a.y = cumulative_allocation(in, e.x, a.agent, -1, a.level);
    else a.y = cumulative_allocation(in, e.x, a.agent);
    a.miss = mean_estimate(tot.miss[r], tot.miss2[r], trials, bernoulli);
    if (dp) {
      if (in.problem == ProblemClass::DisplayAds) {
        const auto lv = weight_levels(in, a.agent);
        const auto l = std::lower_bound(lv.begin(), lv.end(), a.level) - lv.begin();
        a.exact = dp->level_miss[a.agent][l];
      } else {
        a.exact = dp->unmatched[a.agent];
      }
    }
    s.agents.push_back(a);
  }
  s.alg_value = mean_estimate(tot.a, tot.a2, trials, false);
  const double n = static_cast<double>(trials);
  switch (bench) {
    case Benchmark::LP: s.benchmark_value = e.lp_value; break;
    case Benchmark::ExactDP: s.benchmark_value = exact_expected_value(in, *dp); break;
    case Benchmark::HindsightMC: s.benchmark_value = tot.o / n; break;
  }
  if (s.benchmark_value > 0) {
    s.ratio.mean = s.alg_value.mean / s.benchmark_value;
    if (bench == Benchmark::HindsightMC) {
      const double ma = tot.a / n, mo = tot.o / n, R = s.ratio.mean;
      const double va = tot.a2 / n - ma * ma, vo = tot.o2 / n - mo * mo, cov = tot.ao / n - ma * mo;
      s.ratio.std_error = std::sqrt(std::max(0.0, va - 2 * R * cov + R * R * vo) / n) / mo;
    } else {
      s.ratio.std_error = s.alg_value.std_error / s.benchmark_value;
    }
    s.ratio.ci = {s.ratio.mean - kWilsonZ99 * s.ratio.std_error, s.ratio.mean + kWilsonZ99 * s.ratio.std_error};
  }
  return s;
}

StatSummary monte_carlo(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw InvalidInput("trial count must be at least 1");
  if (cfg.algorithm == AlgorithmKind::MultiwayOcsAdWords) {
    if (!cfg.instance_path) throw InvalidInput("MultiwayOcsAdWords reads an adversarial sequence file");
    auto seq = adversarial_from_json(read_text_file(*cfg.instance_path));
    return monte_carlo(prepare_experiment(seq), cfg.algorithm, cfg.trials, cfg.seed, cfg.benchmark, cfg.threads);
  }
  Instance in;
  if (cfg.instance_path) in = instance_from_json(read_text_file(*cfg.instance_path));
  else if (cfg.generator) in = generate(*cfg.generator);
  else throw InvalidInput("experiment needs an instance file or a generator spec");
  auto s = monte_carlo(prepare_experiment(in), cfg.algorithm, cfg.trials, cfg.seed, cfg.benchmark, cfg.threads);
  if (!cfg.output_path.empty()) write_text_file(cfg.output_path, to_json(s));
  return s;
}

RateVerdict rate_verdict(double estimate, double sigma, double g) {
  RateVerdict v;
  v.estimate = estimate;
  v.sigma = sigma;
  v.g = g;
  v.margin = g - estimate;
  v.pass = estimate - kRateSigmas * sigma <= g;
  return v;
}

std::vector<RateVerdict> compare_to_rate(const StatSummary& s, const RateCurve& g) {
  std::vector<RateVerdict> out;
  for (const auto& a : s.agents) {
    RateVerdict v = rate_verdict(a.miss.mean, a.miss.std_error, g(a.y));
    v.agent = a.agent;
    v.level = a.level;
    v.y = a.y;
    if (a.y > 1.0 + 1e-9) {
      v.skipped = true;
      v.pass = true;
    }
    out.push_back(v);
  }
  return out;
}

bool all_pass(const std::vector<RateVerdict>& v) {
  return std::all_of(v.begin(), v.end(), [](const RateVerdict& r) { return r.pass; });
}

std::string to_csv(const StatSummary& s) {
  std::ostringstream os;
  os.precision(10);
  os << "agent,level,y,estimate,std_error,ci_lo,ci_hi,exact\n";
  for (const auto& a : s.agents) {
    os << a.agent << ',' << a.level << ',' << a.y << ',' << a.miss.mean << ',' << a.miss.std_error << ','
       << a.miss.ci.lo << ',' << a.miss.ci.hi << ',';
    if (a.exact) os << *a.exact;
    os << '\n';
  }
  os << "# algorithm=" << to_string(s.algorithm) << " trials=" << s.trials << " seed=" << s.seed
     << " alg_value=" << s.alg_value.mean << " benchmark=" << to_string(s.benchmark) << ':' << s.benchmark_value
     << " ratio=" << s.ratio.mean << " ratio_se=" << s.ratio.std_error << '\n';
  return os.str();
}

std::string to_csv(const std::vector<RateVerdict>& v) {
  std::ostringstream os;
  os.precision(10);
  os << "agent,level,y,estimate,sigma,g,margin,verdict\n";
  for (const auto& r : v)
    os << r.agent << ',' << r.level << ',' << r.y << ',' << r.estimate << ',' << r.sigma << ',' << r.g << ','
       << r.margin << ',' << (r.skipped ? "SKIP" : r.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace socs
