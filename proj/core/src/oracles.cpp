#include "socs/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "socs/display.hpp"
#include "socs/error.hpp"

namespace socs {

std::vector<double> TwoWayInstance::y_step(int t) const {
  std::vector<double> y(J, 0.0);
  for (const auto& o : steps[t]) {
    if (!o.type.two_way) {
      if (o.type.a != kBottom) y[o.type.a] += o.prob;
      continue;
    }
    y[o.type.a] += 0.5 * o.prob;
    if (o.type.b != kBottom) y[o.type.b] += 0.5 * o.prob;
  }
  return y;
}

bool TwoWayInstance::pure_two_way() const {
  for (const auto& st : steps)
    for (const auto& o : st)
      if (!o.type.two_way && o.type.a != kBottom && o.prob > 0) return false;
  return true;
}

TwoWayInstance random_two_way(int J, int T, std::uint64_t seed, double one_way_share) {
  if (J < 2 || T < 1) throw InvalidInput("random two-way instance needs J >= 2 and T >= 1");
  Rng rng(seed, 0, Stream::Generate);
  TwoWayInstance tw;
  tw.J = J;
  tw.steps.resize(T);
  for (auto& st : tw.steps) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const double total = 0.3 + 0.7 * rng.uniform();
    std::vector<double> w(n);
    double sum = 0;
    for (double& v : w) sum += v = -std::log(1.0 - rng.uniform());
    for (int r = 0; r < n; ++r) {
      SurrogateType ty;
      const int a = static_cast<int>(rng.below(J));
      if (rng.uniform() < one_way_share) {
        ty = SurrogateType::one_way(a);
      } else if (rng.uniform() < 0.15) {
        ty = SurrogateType::pair(a, kBottom);
      } else {
        int b = static_cast<int>(rng.below(J - 1));
        if (b >= a) ++b;
        ty = SurrogateType::pair(a, b);
      }
      const double f = total * w[r] / sum;
      auto it = std::find_if(st.begin(), st.end(), [&](const SurrogateOutcome& e) { return e.type == ty; });
      if (it == st.end()) st.push_back({ty, f});
      else it->prob += f;
    }
  }
  return tw;
}

TwoWayInstance surrogate_instance(const Instance& in, const FractionalAllocation& x) {
  if (!x.matches(in)) throw InvalidInput("allocation does not match instance");
  TwoWayInstance tw;
  tw.J = in.num_agents();
  tw.steps.resize(in.T);
  for (int t = 0; t < in.T; ++t)
    for (int i = 0; i < in.num_types(); ++i) {
      const double f = in.prob[t][i];
      if (f <= 0) continue;
      for (const auto& o : surrogate_distribution(x.mu(in, t, i))) {
        auto& st = tw.steps[t];
        auto it = std::find_if(st.begin(), st.end(), [&](const SurrogateOutcome& e) { return e.type == o.type; });
        if (it == st.end()) st.push_back({o.type, f * o.prob});
        else it->prob += f * o.prob;
      }
    }
  return tw;
}

std::pair<Instance, FractionalAllocation> realize_two_way(const TwoWayInstance& tw) {
  Instance in;
  in.problem = ProblemClass::Unweighted;
  in.T = tw.T();
  for (int j = 0; j < tw.J; ++j) in.agent_ids.push_back("a" + std::to_string(j));
  std::vector<SurrogateType> types;
  auto type_index = [&](const SurrogateType& ty) {
    for (std::size_t i = 0; i < types.size(); ++i)
      if (types[i] == ty) return static_cast<int>(i);
    types.push_back(ty);
    return static_cast<int>(types.size()) - 1;
  };
  std::vector<std::vector<std::pair<int, double>>> mass(tw.T());
  for (int t = 0; t < tw.T(); ++t)
    for (const auto& o : tw.steps[t]) {
      if (o.type.a == kBottom || o.prob <= 0) continue;  // one-way dummy mass is just no arrival
      mass[t].push_back({type_index(o.type), o.prob});
    }
  for (const auto& ty : types) {
    std::vector<double> row(tw.J, 0.0);
    row[ty.a] = 1.0;
    std::string id = "a" + std::to_string(ty.a);
    if (ty.two_way) {
      if (ty.b != kBottom) {
        row[ty.b] = 1.0;
        id += "+a" + std::to_string(ty.b);
      } else {
        id += "+dummy";
      }
    }
    in.value.push_back(row);
    in.type_ids.push_back(id);
  }
  const int I = static_cast<int>(types.size());
  in.prob.assign(in.T, std::vector<double>(I, 0.0));
  auto x = FractionalAllocation::zeros(in);
  for (int t = 0; t < in.T; ++t)
    for (auto [i, f] : mass[t]) {
      in.prob[t][i] += f;
      const auto& ty = types[i];
      if (!ty.two_way) {
        x.at(t, i, ty.a) += f;
      } else {
        x.at(t, i, ty.a) += 0.5 * f;
        if (ty.b != kBottom) x.at(t, i, ty.b) += 0.5 * f;
      }
    }
  return {std::move(in), std::move(x)};
}

std::string SubsetTable::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "S,t,u\n";
  for (int t = 0; t <= T; ++t)
    for (unsigned s = 0; s < (1u << J); ++s) os << s << ',' << t << ',' << at(t, s) << '\n';
  return os.str();
}

namespace {

double exp_weight(const std::vector<double>& y, int j) { return j == kBottom ? 1.0 : std::exp(2.0 * y[j]); }

bool in_set(unsigned s, int j) { return j != kBottom && (s >> j & 1u); }

unsigned with(unsigned s, int j) { return j == kBottom ? s : s | (1u << j); }

// u_S^t from row t-1; y_prev = y^{1:(t-1)}.
double recurrence_rhs(const std::vector<SurrogateOutcome>& step, const std::vector<double>& y_prev,
                      const double* prev, unsigned s) {
  double stay = 1.0, moved = 0.0;
  for (const auto& o : step) {
    const auto& ty = o.type;
    if (!ty.two_way) {
      if (in_set(s, ty.a)) stay -= o.prob;
      continue;
    }
    const bool ia = in_set(s, ty.a), ib = in_set(s, ty.b);
    if (!ia && !ib) continue;
    stay -= o.prob;
    if (ia && ib) continue;
    const int j = ia ? ty.a : ty.b;  // in S
    const int k = ia ? ty.b : ty.a;  // outside S
    const double wj = exp_weight(y_prev, j), wk = exp_weight(y_prev, k);
    moved += o.prob * prev[with(s, k)] * wk / (wj + wk);
  }
  return stay * prev[s] + moved;
}

double am_gm_rhs(const std::vector<SurrogateOutcome>& step, const std::vector<double>& y_prev, const double* prev,
                 unsigned s) {
  double stay = 1.0, moved = 0.0;
  for (const auto& o : step) {
    const auto& ty = o.type;
    if (!ty.two_way) {
      if (in_set(s, ty.a)) stay -= o.prob;
      continue;
    }
    const bool ia = in_set(s, ty.a), ib = in_set(s, ty.b);
    if (!ia && !ib) continue;
    stay -= o.prob;
    if (ia && ib) continue;
    const int j = ia ? ty.a : ty.b;
    const int k = ia ? ty.b : ty.a;
    const double yk = k == kBottom ? 0.0 : y_prev[k];
    moved += 0.5 * o.prob * prev[with(s, k)] * std::exp(yk - y_prev[j]);
  }
  return stay * prev[s] + moved;
}

}  // namespace

SubsetTable recurrence_table(const TwoWayInstance& tw) {
  if (tw.J > kRecurrenceAgentCap) throw CapExceeded("recurrence table supports at most 16 agents");
  SubsetTable tab;
  tab.J = tw.J;
  tab.T = tw.T();
  const std::size_t n = std::size_t{1} << tw.J;
  tab.u.assign(n * (tab.T + 1), 0.0);
  std::fill(tab.u.begin(), tab.u.begin() + n, 1.0);
  std::vector<double> y(tw.J, 0.0);
  for (int t = 1; t <= tab.T; ++t) {
    const double* prev = &tab.u[(t - 1) * n];
    double* cur = &tab.u[t * n];
    for (unsigned s = 0; s < n; ++s) cur[s] = recurrence_rhs(tw.steps[t - 1], y, prev, s);
    auto ys = tw.y_step(t - 1);
    for (int j = 0; j < tw.J; ++j) y[j] += ys[j];
  }
  return tab;
}

std::vector<CheckResult> table_property_checks(const TwoWayInstance& tw, const SubsetTable& tab) {
  const std::size_t n = std::size_t{1} << tw.J;
  CheckResult rec{"recurrence", true, 0.0, "max |u - rhs|"};
  CheckResult amgm{"am-gm", true, -INFINITY, "max u - relaxed rhs"};
  CheckResult base{"baseline", true, -INFINITY, "max u - exp(-sum y)"};
  CheckResult single{"singleton-rate", true, -INFINITY, "max u_j - (1+y)exp(-2y)"};
  std::vector<double> y(tw.J, 0.0);
  for (int t = 1; t <= tab.T; ++t) {
    const double* prev = &tab.u[(t - 1) * n];
    for (unsigned s = 0; s < n; ++s) {
      const double u = tab.at(t, s);
      rec.worst = std::max(rec.worst, std::abs(u - recurrence_rhs(tw.steps[t - 1], y, prev, s)));
      amgm.worst = std::max(amgm.worst, u - am_gm_rhs(tw.steps[t - 1], y, prev, s));
    }
    auto ys = tw.y_step(t - 1);
    for (int j = 0; j < tw.J; ++j) y[j] += ys[j];
    for (unsigned s = 0; s < n; ++s) {
      double sum = 0;
      for (int j = 0; j < tw.J; ++j)
        if (s >> j & 1u) sum += y[j];
      base.worst = std::max(base.worst, tab.at(t, s) - std::exp(-sum));
    }
    for (int j = 0; j < tw.J; ++j)
      single.worst = std::max(single.worst, tab.singleton(t, j) - convergence_rate(RateKind::TwoWayMatching, y[j]));
  }
  rec.pass = rec.worst == 0.0;
  amgm.pass = amgm.worst <= 1e-12;
  base.pass = base.worst <= 1e-12;
  std::vector<CheckResult> out{rec, amgm, base};
  if (tw.pure_two_way()) {
    single.pass = single.worst <= 1e-12;
    out.push_back(single);
  }
  return out;
}

const char* to_string(DpAlgorithm a) {
  switch (a) {
    case DpAlgorithm::GeneralMatching: return "GeneralMatching";
    case DpAlgorithm::RandomOrderMatching: return "RandomOrderMatching";
    case DpAlgorithm::GeneralAdWords: return "GeneralAdWords";
    case DpAlgorithm::GeneralDisplay: return "GeneralDisplay";
  }
  return "?";
}

namespace {

using Dists = std::vector<std::vector<std::vector<SurrogateOutcome>>>;  // [t][i]

Dists all_distributions(const Instance& in, const FractionalAllocation& x) {
  Dists d(in.T, std::vector<std::vector<SurrogateOutcome>>(in.num_types()));
  for (int t = 0; t < in.T; ++t)
    for (int i = 0; i < in.num_types(); ++i)
      if (in.prob[t][i] > 0) d[t][i] = surrogate_distribution(x.mu(in, t, i));
  return d;
}

std::vector<std::vector<double>> y_steps(const Instance& in, const FractionalAllocation& x) {
  std::vector<std::vector<double>> ys(in.T, std::vector<double>(in.num_agents(), 0.0));
  for (int t = 0; t < in.T; ++t)
    for (int i = 0; i < in.num_types(); ++i)
      for (int j = 0; j < in.num_agents(); ++j) ys[t][j] += x.at(t, i, j) * in.y_scale(i, j);
  return ys;
}

// Pr[each agent unmatched] with steps processed in `order`.
std::vector<double> matching_dp(const Instance& in, const Dists& d, const std::vector<std::vector<double>>& ys,
                                const std::vector<int>& order) {
  const int J = in.num_agents();
  const std::size_t n = std::size_t{1} << J;
  std::vector<double> p(n, 0.0), q(n);
  p[0] = 1.0;
  std::vector<double> y(J, 0.0);
  for (int t : order) {
    std::fill(q.begin(), q.end(), 0.0);
    double none = 1.0;
    for (int i = 0; i < in.num_types(); ++i) none -= in.prob[t][i];
    for (std::size_t m = 0; m < n; ++m) {
      const double pm = p[m];
      if (pm == 0.0) continue;
      q[m] += none * pm;
      for (int i = 0; i < in.num_types(); ++i) {
        const double f = in.prob[t][i];
        if (f <= 0) continue;
        for (const auto& o : d[t][i]) {
          const double w = f * o.prob * pm;
          const auto& ty = o.type;
          auto is_free = [&](int j) { return j == kBottom || !(m >> j & 1u); };
          if (!ty.two_way) {
            if (ty.a != kBottom && is_free(ty.a)) q[m | (std::size_t{1} << ty.a)] += w;
            else q[m] += w;
            continue;
          }
          const bool fa = is_free(ty.a), fb = is_free(ty.b);
          if (fa && fb) {
            const double wa = exp_weight(y, ty.a), wb = exp_weight(y, ty.b);
            const double pa = 1.0 / (1.0 + wb / wa);
            q[m | (std::size_t{1} << ty.a)] += w * pa;
            q[ty.b == kBottom ? m : m | (std::size_t{1} << ty.b)] += w * (1.0 - pa);
          } else if (fa) {
            q[m | (std::size_t{1} << ty.a)] += w;
          } else if (fb && ty.b != kBottom) {
            q[m | (std::size_t{1} << ty.b)] += w;
          } else {
            q[m] += w;
          }
        }
      }
    }
    std::swap(p, q);
    for (int j = 0; j < J; ++j) y[j] += ys[t][j];
  }
  std::vector<double> un(J, 0.0);
  for (std::size_t m = 0; m < n; ++m)
    for (int j = 0; j < J; ++j)
      if (!(m >> j & 1u)) un[j] += p[m];
  return un;
}

// Per-agent mark status: 0 unmarked, 1 marked once and selected, 2 marked once
// and not selected, 3 marked twice or more.
struct Branch {
  int selected;  // real agent, or -1
  int m;         // agent whose code changes, or -1
  std::uint64_t code;
  double prob;
};

template <class Markable>
std::vector<Branch> pair_branches(int a, int b, const std::vector<std::uint64_t>& code, Markable&& markable) {
  std::vector<Branch> out;
  auto real = [](int j) { return j >= 0 ? j : -1; };
  for (int m : {a, b}) {
    if (!markable(m)) {
      out.push_back({real(a), -1, 0, 0.25});
      out.push_back({real(b), -1, 0, 0.25});
      continue;
    }
    const int other = m == a ? b : a;
    switch (code[m]) {
      case 0:
        out.push_back({real(m), m, 1, 0.25});
        out.push_back({real(other), m, 2, 0.25});
        break;
      case 1: out.push_back({real(other), m, 3, 0.5}); break;
      case 2: out.push_back({real(m), m, 3, 0.5}); break;
      default:
        out.push_back({real(a), m, 3, 0.25});
        out.push_back({real(b), m, 3, 0.25});
    }
  }
  return out;
}

// State: [0, J) resource bits (capped spend or best weight), [J, 2J) mark codes.
using State = std::vector<std::uint64_t>;

template <class Apply, class Markable>
std::map<State, double> resource_dp(const Instance& in, const Dists& d, std::size_t cap, std::size_t& max_states,
                                    Apply&& apply, Markable&& markable) {
  const int J = in.num_agents();
  std::map<State, double> p;
  p[State(2 * J, 0)] = 1.0;
  for (int t = 0; t < in.T; ++t) {
    std::map<State, double> q;
    double none = 1.0;
    for (int i = 0; i < in.num_types(); ++i) none -= in.prob[t][i];
    for (const auto& [s, ps] : p) {
      if (none != 0.0) q[s] += none * ps;
      std::vector<std::uint64_t> code(s.begin() + J, s.end());
      for (int i = 0; i < in.num_types(); ++i) {
        const double f = in.prob[t][i];
        if (f <= 0) continue;
        for (const auto& o : d[t][i]) {
          const double w = f * o.prob * ps;
          const auto& ty = o.type;
          if (!ty.two_way) {
            State n = s;
            if (ty.a != kBottom) n[ty.a] = apply(n[ty.a], i, ty.a);
            q[n] += w;
            continue;
          }
          auto mk = [&](int m) { return markable(m, i); };
          for (const auto& br : pair_branches(ty.a, ty.b, code, mk)) {
            State n = s;
            if (br.selected >= 0) n[br.selected] = apply(n[br.selected], i, br.selected);
            if (br.m >= 0) n[J + br.m] = br.code;
            q[n] += w * br.prob;
          }
        }
      }
      if (q.size() > cap) throw CapExceeded("exact DP state space exceeds the cap");
    }
    p = std::move(q);
    max_states = std::max(max_states, p.size());
  }
  return p;
}

}  // namespace

DpResult exact_state_dp(const Instance& in, const FractionalAllocation& x, DpAlgorithm alg, std::size_t cap) {
  if (!x.matches(in)) throw InvalidInput("allocation does not match instance");
  const int J = in.num_agents();
  const Dists d = all_distributions(in, x);
  DpResult r;
  switch (alg) {
    case DpAlgorithm::GeneralMatching:
    case DpAlgorithm::RandomOrderMatching: {
      if (J > 20 || (std::size_t{1} << J) > cap) throw CapExceeded("exact DP: too many agents for the subset state");
      const auto ys = y_steps(in, x);
      std::vector<int> order(in.T);
      std::iota(order.begin(), order.end(), 0);
      r.max_states = std::size_t{1} << J;
      if (alg == DpAlgorithm::GeneralMatching) {
        r.unmatched = matching_dp(in, d, ys, order);
        break;
      }
      if (in.T > kRandomOrderDpCap) throw CapExceeded("random-order DP enumerates at most 7! orders");
      r.unmatched.assign(J, 0.0);
      long count = 0;
      do {
        auto u = matching_dp(in, d, ys, order);
        for (int j = 0; j < J; ++j) r.unmatched[j] += u[j];
        ++count;
      } while (std::next_permutation(order.begin(), order.end()));
      for (double& v : r.unmatched) v /= static_cast<double>(count);
      break;
    }
    case DpAlgorithm::GeneralAdWords: {
      if (in.problem != ProblemClass::AdWords) throw InvalidInput("exact DP: AdWords instance required");
      auto apply = [&](std::uint64_t bits, int i, int j) {
        const double s = std::min(std::bit_cast<double>(bits) + in.value[i][j], in.budget[j]);
        return std::bit_cast<std::uint64_t>(s);
      };
      auto markable = [&](int m, int i) { return m >= 0 && in.value[i][m] >= (2.0 / 3.0) * in.budget[m]; };
      auto p = resource_dp(in, d, cap, r.max_states, apply, markable);
      r.unmatched.assign(J, 0.0);
      for (const auto& [s, ps] : p)
        for (int j = 0; j < J; ++j) r.unmatched[j] += ps * (in.budget[j] - std::bit_cast<double>(s[j])) / in.budget[j];
      break;
    }
    case DpAlgorithm::GeneralDisplay: {
      if (in.problem != ProblemClass::DisplayAds) throw InvalidInput("exact DP: DisplayAds instance required");
      auto apply = [&](std::uint64_t bits, int i, int j) {
        return std::bit_cast<std::uint64_t>(std::max(std::bit_cast<double>(bits), in.value[i][j]));
      };
      auto markable = [](int m, int) { return m >= 0; };
      auto p = resource_dp(in, d, cap, r.max_states, apply, markable);
      r.unmatched.assign(J, 0.0);
      r.level_miss.resize(J);
      for (int j = 0; j < J; ++j) r.level_miss[j].assign(weight_levels(in, j).size(), 0.0);
      for (const auto& [s, ps] : p)
        for (int j = 0; j < J; ++j) {
          const double best = std::bit_cast<double>(s[j]);
          if (best == 0.0) r.unmatched[j] += ps;
          const auto lv = weight_levels(in, j);
          for (std::size_t l = 0; l < lv.size(); ++l)
            if (best < lv[l]) r.level_miss[j][l] += ps;
        }
      break;
    }
  }
  return r;
}

ConverseJensen converse_jensen_check(const Instance& in, const FractionalAllocation& x, const std::vector<int>& types,
                                     int j) {
  if (!x.matches(in)) throw InvalidInput("allocation does not match instance");
  if (j < 0 || j >= in.num_agents()) throw InvalidInput("converse Jensen: unknown agent");
  ConverseJensen c;
  double sq = 0;
  for (int t = 0; t < in.T; ++t) {
    double col = 0;
    for (int i : types) {
      const double v = x.at(t, i, j);
      c.lhs += std::max(0.0, 2.0 * v - in.prob[t][i]);
      col += v;
    }
    sq += col * col;
  }
  c.rhs = 1.0 - std::log(2.0) + 2.0 * sq;
  c.holds = c.lhs <= c.rhs + kConverseJensenTol;
  return c;
}

double converse_jensen_sweep(const Instance& in, const FractionalAllocation& x) {
  const int I = in.num_types();
  std::vector<std::vector<int>> subsets;
  if (I <= 10) {
    for (unsigned s = 1; s < (1u << I); ++s) {
      std::vector<int> v;
      for (int i = 0; i < I; ++i)
        if (s >> i & 1u) v.push_back(i);
      subsets.push_back(std::move(v));
    }
  } else {
    std::vector<int> all(I);
    std::iota(all.begin(), all.end(), 0);
    subsets.push_back(all);
    for (int i = 0; i < I; ++i) subsets.push_back({i});
  }
  double worst = INFINITY;
  for (int j = 0; j < in.num_agents(); ++j) {
    auto level_sets = subsets;
    if (I > 10)
      for (double w : weight_levels(in, j)) {
        std::vector<int> v;
        for (int i = 0; i < I; ++i)
          if (in.value[i][j] >= w) v.push_back(i);
        level_sets.push_back(std::move(v));
      }
    for (const auto& s : level_sets) {
      auto c = converse_jensen_check(in, x, s, j);
      worst = std::min(worst, c.rhs - c.lhs);
    }
  }
  return worst;
}

std::pair<Instance, FractionalAllocation> tightness_instance(double y, int T) {
  if (T < 1) throw InvalidInput("tightness instance: T must be positive");
  if (!(y >= 0)) throw InvalidInput("tightness instance: y must be non-negative");
  const double f = 2.0 * y / T;
  if (f > 1.0) throw InvalidInput("tightness instance: arrival rate 2y/T exceeds 1");
  Instance in;
  in.problem = ProblemClass::Unweighted;
  in.T = T;
  in.agent_ids = {"j", "k"};
  in.type_ids = {"jk"};
  in.value = {{1.0, 1.0}};
  in.prob.assign(T, std::vector<double>{f});
  auto x = FractionalAllocation::zeros(in);
  for (int t = 0; t < T; ++t) x.at(t, 0, 0) = x.at(t, 0, 1) = 0.5 * f;
  return {std::move(in), std::move(x)};
}

}  // namespace socs
