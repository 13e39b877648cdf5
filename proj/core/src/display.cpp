#include "socs/display.hpp"

#include <algorithm>
#include <numeric>

#include "socs/error.hpp"

namespace socs {

TwoWayTrace step_two_way_display(DisplayState& s, int j, int k, const std::vector<double>& w, double u_pick,
                                 double u_choice) {
  TwoWayTrace tr = mark_and_oppose(s.book, j, k, [](int m) { return m >= 0; }, u_pick, u_choice);
  if (tr.selected >= 0) s.best[tr.selected] = std::max(s.best[tr.selected], w[tr.selected]);
  return tr;
}

double DisplayOutcome::total_value() const { return std::accumulate(value.begin(), value.end(), 0.0); }

DisplayOutcome run_general_display(const DisplayPlan& plan, const ArrivalSequence& arr, TrialRng& rng,
                                   bool keep_trace) {
  const Instance& in = *plan.inst;
  if (in.problem != ProblemClass::DisplayAds) throw InvalidInput("run_general_display: DisplayAds instance required");
  if (static_cast<int>(arr.types.size()) != in.T) throw InvalidInput("run_general_display: arrival length differs");
  DisplayState s(in.num_agents());
  DisplayOutcome out;
  for (int t = 0; t < in.T; ++t) {
    const int i = arr.types[t];
    if (i == kNoArrival) continue;
    const auto slot = static_cast<std::uint64_t>(t);
    const SurrogateType st = plan.at(t, i).sample(0.5 * rng.decompose.uniform_at(slot));
    int sel = -1;
    if (!st.two_way) {
      sel = st.a;
      if (sel >= 0) s.best[sel] = std::max(s.best[sel], in.value[i][sel]);
    } else {
      TwoWayTrace tr =
          step_two_way_display(s, st.a, st.b, in.value[i], rng.mark.uniform_at(slot), rng.choice.uniform_at(slot));
      tr.t = t;
      sel = tr.selected;
      if (keep_trace) out.trace.push_back(tr);
    }
    if (sel >= 0) out.assignment.push_back({t, i, sel});
  }
  out.value = s.best;
  return out;
}

DisplayOutcome run_general_display(const Instance& in, const FractionalAllocation& x, const ArrivalSequence& arr,
                                   std::uint64_t seed, std::uint64_t trial) {
  DisplayPlan plan(in, x);
  TrialRng rng(seed, trial);
  return run_general_display(plan, arr, rng);
}

std::vector<double> weight_levels(const Instance& in, int j) {
  std::vector<double> lv;
  for (int i = 0; i < in.num_types(); ++i)
    if (in.value[i][j] > 0) lv.push_back(in.value[i][j]);
  std::sort(lv.begin(), lv.end());
  lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
  return lv;
}

std::vector<LevelFlag> value_profile(const Instance& in, const std::vector<Match>& assignment, int j) {
  if (j < 0 || j >= in.num_agents()) throw InvalidInput("value_profile: unknown agent");
  double best = 0;
  for (const auto& m : assignment)
    if (m.agent == j) best = std::max(best, in.value[m.type][j]);
  std::vector<LevelFlag> out;
  for (double w : weight_levels(in, j)) out.push_back({w, best >= w});
  return out;
}

double value_from_profile(const std::vector<LevelFlag>& p) {
  double v = 0, prev = 0;
  for (const auto& f : p) {
    if (f.covered) v += f.level - prev;
    prev = f.level;
  }
  return v;
}

}  // namespace socs
