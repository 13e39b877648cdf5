#include "socs/adwords.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "socs/error.hpp"

namespace socs {

TwoWayTrace step_two_way_adwords(AdWordsState& s, int j, int k, const std::vector<double>& bids, double u_pick,
                                 double u_choice) {
  auto markable = [&](int m) { return m >= 0 && s.large(m, bids[m]); };
  TwoWayTrace tr = mark_and_oppose(s.book, j, k, markable, u_pick, u_choice);
  if (tr.selected >= 0) s.spent[tr.selected] += bids[tr.selected];
  return tr;
}

double AdWordsOutcome::total_value() const { return std::accumulate(value.begin(), value.end(), 0.0); }
double OcsOutcome::total_value() const { return std::accumulate(value.begin(), value.end(), 0.0); }

AdWordsPlan::AdWordsPlan(const Instance& in, const FractionalAllocation& x) : inst(&in), base(in, x) {
  if (in.problem != ProblemClass::AdWords) throw InvalidInput("AdWords instance required");
}

AdWordsOutcome run_general_adwords(const AdWordsPlan& plan, const ArrivalSequence& arr, TrialRng& rng,
                                   bool keep_trace) {
  const Instance& in = *plan.inst;
  if (static_cast<int>(arr.types.size()) != in.T) throw InvalidInput("run_general_adwords: arrival length differs");
  AdWordsState s(in.budget);
  AdWordsOutcome out;
  for (int t = 0; t < in.T; ++t) {
    const int i = arr.types[t];
    if (i == kNoArrival) continue;
    const auto slot = static_cast<std::uint64_t>(t);
    const SurrogateType st = plan.base.at(t, i).sample(0.5 * rng.decompose.uniform_at(slot));
    int sel = -1;
    if (!st.two_way) {
      sel = st.a;
      if (sel >= 0) s.spent[sel] += in.value[i][sel];
    } else {
      TwoWayTrace tr = step_two_way_adwords(s, st.a, st.b, in.value[i], rng.mark.uniform_at(slot),
                                            rng.choice.uniform_at(slot));
      tr.t = t;
      sel = tr.selected;
      if (keep_trace) out.trace.push_back(tr);
    }
    if (sel >= 0) out.assignment.push_back({t, i, sel});
  }
  out.spent = s.spent;
  out.value.resize(in.num_agents());
  for (int j = 0; j < in.num_agents(); ++j) out.value[j] = s.value(j);
  return out;
}

AdWordsOutcome run_general_adwords(const Instance& in, const FractionalAllocation& x, const ArrivalSequence& arr,
                                   std::uint64_t seed, std::uint64_t trial) {
  AdWordsPlan plan(in, x);
  TrialRng rng(seed, trial);
  return run_general_adwords(plan, arr, rng);
}

std::vector<double> adversarial_y(const AdversarialSequence& seq) {
  std::vector<double> y(seq.num_agents(), 0.0);
  for (int t = 0; t < seq.T(); ++t)
    for (int j = 0; j < seq.num_agents(); ++j) y[j] += seq.mu[t][j] * seq.bids[t][j] / seq.budget[j];
  return y;
}

namespace {

void check_sequence(const AdversarialSequence& seq, bool need_mu) {
  const int n = seq.num_agents();
  if (n < 1) throw InvalidInput("adversarial sequence: no agents");
  for (double B : seq.budget)
    if (!(B > 0)) throw InvalidInput("adversarial sequence: budget must be positive");
  for (const auto& row : seq.bids) {
    if (static_cast<int>(row.size()) != n) throw InvalidInput("adversarial sequence: bid row length");
    for (double b : row)
      if (!(b >= 0)) throw InvalidInput("adversarial sequence: negative bid");
  }
  if (!need_mu) return;
  if (seq.mu.size() != seq.bids.size()) throw InvalidInput("adversarial sequence: mu missing");
  for (int t = 0; t < seq.T(); ++t) {
    const auto& m = seq.mu[t];
    if (static_cast<int>(m.size()) != n) throw InvalidInput("adversarial sequence: mu row length");
    double s = 0;
    for (double v : m) {
      if (!(v >= -1e-12)) throw InvalidInput("mu^t is not a distribution (negative entry)");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw InvalidInput("mu^t is not a distribution (sums to " + std::to_string(s) + ")");
  }
}

}  // namespace

OcsOutcome run_multiway_ocs_adwords(const AdversarialSequence& seq, TrialRng& rng, bool keep_trace) {
  check_sequence(seq, true);
  AdWordsState s(seq.budget);
  OcsOutcome out;
  out.assignment.assign(seq.T(), -1);
  for (int t = 0; t < seq.T(); ++t) {
    const auto slot = static_cast<std::uint64_t>(t);
    // Only mu^t is consulted here: the step never looks ahead.
    const SurrogateType st = Decomposer(seq.mu[t]).sample(0.5 * rng.decompose.uniform_at(slot));
    int sel = -1;
    if (!st.two_way) {
      sel = st.a;
      if (sel >= 0) s.spent[sel] += seq.bids[t][sel];
    } else {
      TwoWayTrace tr =
          step_two_way_adwords(s, st.a, st.b, seq.bids[t], rng.mark.uniform_at(slot), rng.choice.uniform_at(slot));
      tr.t = t;
      sel = tr.selected;
      if (keep_trace) out.trace.push_back(tr);
    }
    out.assignment[t] = sel;
  }
  out.spent = s.spent;
  out.value.resize(seq.num_agents());
  for (int j = 0; j < seq.num_agents(); ++j) out.value[j] = s.value(j);
  return out;
}

OcsOutcome run_multiway_ocs_adwords(const AdversarialSequence& seq, std::uint64_t seed, std::uint64_t trial) {
  TrialRng rng(seed, trial);
  return run_multiway_ocs_adwords(seq, rng);
}

double adversarial_optimum(const AdversarialSequence& seq) {
  check_sequence(seq, false);
  Instance in;
  in.problem = ProblemClass::AdWords;
  in.T = seq.T();
  in.agent_ids = seq.agent_ids;
  if (in.agent_ids.empty())
    for (int j = 0; j < seq.num_agents(); ++j) in.agent_ids.push_back(std::to_string(j));
  in.budget = seq.budget;
  ArrivalSequence a;
  for (int t = 0; t < seq.T(); ++t) {
    in.type_ids.push_back("t" + std::to_string(t));
    in.value.push_back(seq.bids[t]);
    a.types.push_back(t);
  }
  in.prob.assign(in.T, std::vector<double>(in.T, 0.0));
  for (int t = 0; t < in.T; ++t) in.prob[t][t] = 1.0;
  return hindsight_optimum(in, a);
}

}  // namespace socs
