#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "socs/adwords.hpp"
#include "socs/harness.hpp"
#include "socs/lp.hpp"
#include "socs/matching.hpp"
#include "socs/oracles.hpp"
#include "socs/query_commit.hpp"
#include "socs/rates.hpp"

namespace {

socs::Instance matching_instance(int n) {
  return socs::generate({socs::ProblemClass::VertexWeighted, n, n, n, 0.5, 7});
}

void BM_MatchingLp(benchmark::State& st) {
  const auto in = matching_instance(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(socs::solve_matching_lp(in));
}
BENCHMARK(BM_MatchingLp)->Arg(3)->Arg(4)->Arg(5);

void BM_AdwordsLp(benchmark::State& st) {
  const auto in = socs::generate({socs::ProblemClass::AdWords, 3, 3, static_cast<int>(st.range(0)), 0.6, 11});
  for (auto _ : st) benchmark::DoNotOptimize(socs::solve_adwords_lp(in));
}
BENCHMARK(BM_AdwordsLp)->Arg(3)->Arg(5);

void BM_GeneralMatchingTrial(benchmark::State& st) {
  const auto in = matching_instance(8);
  auto [x, rep] = socs::solve_matching_lp(in);
  socs::MatchingPlan plan(in, x);
  std::uint64_t trial = 0;
  for (auto _ : st) {
    socs::TrialRng rng(1, trial++);
    auto arr = socs::sample_arrivals(in, rng.arrival);
    benchmark::DoNotOptimize(socs::run_general(plan, arr, rng));
  }
}
BENCHMARK(BM_GeneralMatchingTrial);

void BM_HindsightMC(benchmark::State& st) {
  const auto in = matching_instance(8);
  std::uint64_t trial = 0;
  for (auto _ : st) {
    auto arr = socs::sample_arrivals(in, 3, trial++);
    benchmark::DoNotOptimize(socs::hindsight_optimum(in, arr));
  }
}
BENCHMARK(BM_HindsightMC);

void BM_ExactDP(benchmark::State& st) {
  auto tw = socs::random_two_way(static_cast<int>(st.range(0)), 6, 5);
  auto [in, x] = socs::realize_two_way(tw);
  for (auto _ : st) benchmark::DoNotOptimize(socs::exact_state_dp(in, x, socs::DpAlgorithm::GeneralMatching));
}
BENCHMARK(BM_ExactDP)->Arg(4)->Arg(8);

void BM_RecurrenceTable(benchmark::State& st) {
  auto tw = socs::random_two_way(static_cast<int>(st.range(0)), 10, 5);
  for (auto _ : st) benchmark::DoNotOptimize(socs::recurrence_table(tw));
}
BENCHMARK(BM_RecurrenceTable)->Arg(8)->Arg(12);

void BM_VertexDecomposition(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  std::vector<double> p(n, 0.5), x(n, 0.9 * (1.0 - std::pow(0.5, n)) / n);
  for (auto _ : st) benchmark::DoNotOptimize(socs::vertex_decomposition(x, p));
}
BENCHMARK(BM_VertexDecomposition)->Arg(3)->Arg(6);

void BM_MultiwayArgmax(benchmark::State& st) {
  double y = 0.05;
  for (auto _ : st) {
    benchmark::DoNotOptimize(socs::multiway_argmax(y));
    y = y > 3 ? 0.05 : y + 0.01;
  }
}
BENCHMARK(BM_MultiwayArgmax);

}  // namespace

BENCHMARK_MAIN();
