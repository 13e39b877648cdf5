#include "socs/lp.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <functional>
#include <map>

#include "socs/error.hpp"
#include "socs/simplex.hpp"

namespace socs {

const char* to_string(VbarMode m) {
  switch (m) {
    case VbarMode::Exact: return "Exact";
    case VbarMode::LargeBidsExact: return "LargeBidsExact";
    case VbarMode::MonteCarlo: return "MonteCarlo";
  }
  return "?";
}

namespace {

struct VarMap {
  std::vector<int> index;  // flat (t,i,j) -> var or -1
  std::vector<std::array<int, 3>> cell;  // var -> (t,i,j)
  int I = 0, J = 0;
  int at(int t, int i, int j) const { return index[(static_cast<std::size_t>(t) * I + i) * J + j]; }
  int size() const { return static_cast<int>(cell.size()); }
};

VarMap build_vars(const Instance& in) {
  VarMap v;
  v.I = in.num_types();
  v.J = in.num_agents();
  v.index.assign(static_cast<std::size_t>(in.T) * v.I * v.J, -1);
  for (int t = 0; t < in.T; ++t)
    for (int i = 0; i < v.I; ++i)
      for (int j = 0; j < v.J; ++j)
        if (in.prob[t][i] > 0 && in.adjacent(i, j)) {
          v.index[(static_cast<std::size_t>(t) * v.I + i) * v.J + j] = v.size();
          v.cell.push_back({t, i, j});
        }
  return v;
}

void add_mass_rows(const Instance& in, const VarMap& v, LinearProgram& lp) {
  for (int t = 0; t < in.T; ++t)
    for (int i = 0; i < in.num_types(); ++i) {
      std::vector<double> a(v.size(), 0.0);
      bool any = false;
      for (int j = 0; j < in.num_agents(); ++j)
        if (int k = v.at(t, i, j); k >= 0) {
          a[k] = 1.0;
          any = true;
        }
      if (any) lp.add_row(std::move(a), RowSense::Le, in.prob[t][i]);
    }
}

FractionalAllocation to_allocation(const Instance& in, const VarMap& v, const std::vector<double>& z) {
  auto x = FractionalAllocation::zeros(in);
  for (int k = 0; k < v.size(); ++k) x.at(v.cell[k][0], v.cell[k][1], v.cell[k][2]) = z[k];
  return x;
}

// Support of agent j grouped by step.
std::vector<std::vector<int>> support_by_step(const Instance& in, const FractionalAllocation& x, int j,
                                              double tol, const std::function<bool(int)>& keep_type,
                                              int cap) {
  std::vector<std::vector<int>> g(in.T);
  int total = 0;
  for (int t = 0; t < in.T; ++t)
    for (int i = 0; i < in.num_types(); ++i)
      if (x.at(t, i, j) > tol && keep_type(i)) {
        g[t].push_back(i);
        ++total;
      }
  if (total > cap) throw CapExceeded("separation: support of " + std::to_string(total) + " cells exceeds cap");
  return g;
}

// Enumerates all subsets (one sub-choice per step) depth-first. `enter`
// pushes the choice at step t and returns an undo token; `leaf` scores.
struct StepChoice {
  int t;
  std::vector<int> types;
};

Violation best_matching_violation(const Instance& in, const FractionalAllocation& x, int j, double tol,
                                  int cap) {
  auto groups = support_by_step(in, x, j, tol, [](int) { return true; }, cap);
  Violation best;
  best.amount = -std::numeric_limits<double>::infinity();
  std::vector<Cell> cur;
  std::function<void(int, double, double)> dfs = [&](int t, double X, double P) {
    if (t == in.T) {
      if (cur.empty()) return;
      const double rhs = 1.0 - P;
      if (X - rhs > best.amount) {
        best.amount = X - rhs;
        best.rhs = rhs;
        best.cells = cur;
      }
      return;
    }
    const auto& g = groups[t];
    const int k = static_cast<int>(g.size());
    for (int m = 0; m < (1 << k); ++m) {
      double sx = 0, sf = 0;
      for (int b = 0; b < k; ++b)
        if (m >> b & 1) {
          sx += x.at(t, g[b], j);
          sf += in.prob[t][g[b]];
          cur.push_back({t, g[b]});
        }
      dfs(t + 1, X + sx, P * (1.0 - sf));
      for (int b = 0; b < k; ++b)
        if (m >> b & 1) cur.pop_back();
    }
  };
  dfs(0, 0.0, 1.0);
  if (best.cells.empty()) best.amount = 0;
  return best;
}

double tight_slack(const LpRow& r, const std::vector<double>& z) {
  double s = 0;
  for (std::size_t k = 0; k < z.size(); ++k) s += r.a[k] * z[k];
  return r.rhs - s;
}

}  // namespace

double matching_rhs(const Instance& in, const CellSet& s) {
  std::vector<double> step_mass(in.T, 0.0);
  for (const auto& c : s) step_mass[c.t] += in.prob[c.t][c.i];
  double p = 1.0;
  for (double m : step_mass) p *= 1.0 - m;
  return 1.0 - p;
}

std::optional<Violation> matching_separation(const Instance& in, const FractionalAllocation& x, int j,
                                             double tol, int cap) {
  if (j < 0 || j >= in.num_agents()) throw InvalidInput("matching_separation: unknown agent");
  Violation v = best_matching_violation(in, x, j, tol, cap);
  if (v.amount > tol) return v;
  return std::nullopt;
}

double lp_objective(const Instance& in, const FractionalAllocation& x) {
  double s = 0;
  for (int t = 0; t < in.T; ++t)
    for (int i = 0; i < in.num_types(); ++i)
      for (int j = 0; j < in.num_agents(); ++j) s += in.gain(i, j) * x.at(t, i, j);
  return s;
}

namespace {

template <class Separate>
std::pair<FractionalAllocation, LpSolveReport> cutting_plane(const Instance& in, LinearProgram lp,
                                                             const VarMap& v, Separate separate) {
  LpSolveReport rep;
  const int base_rows = static_cast<int>(lp.rows.size());
  std::vector<SubsetConstraint> cuts;
  const int round_cap = std::max(10, 10 * v.size());
  LpSolution sol;
  FractionalAllocation x = FractionalAllocation::zeros(in);
  while (true) {
    sol = solve_lp(lp);
    rep.iterations += sol.iterations;
    ++rep.rounds;
    if (sol.status == LpStatus::Infeasible) throw SolverFailure("LP infeasible (instance should always admit x = 0)");
    if (sol.status != LpStatus::Optimal) throw SolverFailure(std::string("LP solve failed: ") + to_string(sol.status));
    x = to_allocation(in, v, sol.x);
    bool added = false;
    for (int j = 0; j < in.num_agents(); ++j) {
      auto viol = separate(x, j, rep);
      if (!viol) continue;
      std::vector<double> a(v.size(), 0.0);
      for (const auto& c : viol->cells) {
        int k = v.at(c.t, c.i, j);
        a[k] = in.problem == ProblemClass::AdWords ? in.value[c.i][j] : 1.0;
      }
      lp.add_row(std::move(a), RowSense::Le, viol->rhs);
      cuts.push_back({j, viol->cells, viol->rhs});
      added = true;
    }
    if (!added) break;
    if (rep.rounds >= round_cap) {
      rep.converged = false;
      throw SolverFailure("cutting-plane did not converge within the round cap");
    }
  }
  rep.objective = lp_objective(in, x);
  for (std::size_t c = 0; c < cuts.size(); ++c)
    if (std::abs(tight_slack(lp.rows[base_rows + c], sol.x)) <= 1e-9) rep.active.push_back(cuts[c]);
  return {x, rep};
}

}  // namespace

std::pair<FractionalAllocation, LpSolveReport> solve_matching_lp(const Instance& in, const LpOptions& opt) {
  if (!(in.is_matching() || in.problem == ProblemClass::DisplayAds))
    throw InvalidInput("solve_matching_lp: matching-class instance required");
  if (!validate(in).ok()) throw InvalidInput("solve_matching_lp: invalid instance");
  VarMap v = build_vars(in);
  LinearProgram lp;
  lp.num_vars = v.size();
  lp.objective.resize(v.size());
  for (int k = 0; k < v.size(); ++k) lp.objective[k] = in.gain(v.cell[k][1], v.cell[k][2]);
  add_mass_rows(in, v, lp);
  for (int k = 0; k < v.size(); ++k) {
    std::vector<double> a(v.size(), 0.0);
    a[k] = 1.0;
    lp.add_row(std::move(a), RowSense::Le, in.prob[v.cell[k][0]][v.cell[k][1]]);
  }
  auto sep = [&](const FractionalAllocation& x, int j, LpSolveReport&) {
    return matching_separation(in, x, j, opt.tol, opt.separation_cap);
  };
  auto out = cutting_plane(in, std::move(lp), v, sep);
  out.second.max_violation = check_feasibility(in, out.first, opt.tol).max_violation;
  return out;
}

bool is_large_bid(const Instance& in, int i, int j) {
  return in.value[i][j] >= (2.0 / 3.0) * in.budget[j];
}

namespace {

void require_adwords(const Instance& in, const char* who) {
  if (in.problem != ProblemClass::AdWords) throw InvalidInput(std::string(who) + ": AdWords instance required");
}

void add_fluid_rows(const Instance& in, const VarMap& v, LinearProgram& lp) {
  for (int j = 0; j < in.num_agents(); ++j) {
    std::vector<double> a(v.size(), 0.0);
    bool any = false;
    for (int k = 0; k < v.size(); ++k)
      if (v.cell[k][2] == j) {
        a[k] = in.value[v.cell[k][1]][j];
        any = true;
      }
    if (any) lp.add_row(std::move(a), RowSense::Le, in.budget[j]);
  }
}

LinearProgram adwords_base(const Instance& in, const VarMap& v) {
  LinearProgram lp;
  lp.num_vars = v.size();
  lp.objective.resize(v.size());
  for (int k = 0; k < v.size(); ++k) lp.objective[k] = in.value[v.cell[k][1]][v.cell[k][2]];
  add_mass_rows(in, v, lp);
  add_fluid_rows(in, v, lp);
  return lp;
}

// Distribution of min(sum, B) as (value, prob) pairs.
using Dist = std::vector<std::pair<double, double>>;

Dist add_step(const Dist& d, const std::vector<std::pair<double, double>>& arrivals /* (f, b) */, double B) {
  double none = 1.0;
  for (auto& a : arrivals) none -= a.first;
  std::map<double, double> acc;
  for (auto& [val, p] : d) {
    if (none > 0) acc[val] += p * none;
    for (auto& [f, b] : arrivals) acc[std::min(val + b, B)] += p * f;
  }
  return Dist(acc.begin(), acc.end());
}

double dist_mean(const Dist& d) {
  double s = 0;
  for (auto& [v, p] : d) s += v * p;
  return s;
}

struct McSamples {
  int n = 0;
  std::vector<int> r;  // n x T realized types
};

McSamples draw_samples(const Instance& in, const VbarOptions& opt) {
  McSamples s;
  s.n = std::max(1, opt.samples);
  s.r.resize(static_cast<std::size_t>(s.n) * in.T);
  for (int k = 0; k < s.n; ++k) {
    Rng rng(opt.seed, static_cast<std::uint64_t>(k), Stream::Misc);
    auto a = sample_arrivals(in, rng);
    std::copy(a.types.begin(), a.types.end(), s.r.begin() + static_cast<std::size_t>(k) * in.T);
  }
  return s;
}

}  // namespace

VbarValue evaluate_vbar(const Instance& in, int j, const CellSet& s, const VbarOptions& opt) {
  require_adwords(in, "evaluate_vbar");
  if (j < 0 || j >= in.num_agents()) throw InvalidInput("evaluate_vbar: unknown agent");
  const double B = in.budget[j];
  std::vector<std::vector<int>> by_step(in.T);
  for (auto& c : s) {
    if (c.t < 0 || c.t >= in.T || c.i < 0 || c.i >= in.num_types()) throw InvalidInput("evaluate_vbar: cell out of range");
    by_step[c.t].push_back(c.i);
  }
  VbarValue out;
  switch (opt.mode) {
    case VbarMode::Exact: {
      if (static_cast<int>(s.size()) > kVbarExactCap) throw CapExceeded("evaluate_vbar: |S| over exact cap");
      Dist d{{0.0, 1.0}};
      for (int t = 0; t < in.T; ++t) {
        if (by_step[t].empty()) continue;
        std::vector<std::pair<double, double>> arr;
        for (int i : by_step[t]) arr.push_back({in.prob[t][i], in.value[i][j]});
        d = add_step(d, arr, B);
      }
      out.value = dist_mean(d);
      break;
    }
    case VbarMode::LargeBidsExact: {
      double p0 = 1.0, p1 = 0.0, e1 = 0.0;
      for (int t = 0; t < in.T; ++t) {
        double F = 0, V = 0;
        for (int i : by_step[t]) {
          if (!is_large_bid(in, i, j)) throw InvalidInput("evaluate_vbar: LargeBidsExact needs large bids only");
          F += in.prob[t][i];
          V += in.prob[t][i] * std::min(in.value[i][j], B);
        }
        e1 = e1 * (1 - F) + p0 * V;
        p1 = p1 * (1 - F) + p0 * F;
        p0 *= 1 - F;
      }
      out.value = e1 + std::max(0.0, 1 - p0 - p1) * B;
      break;
    }
    case VbarMode::MonteCarlo: {
      McSamples ss = draw_samples(in, opt);
      double sum = 0, sq = 0;
      for (int k = 0; k < ss.n; ++k) {
        double v = 0;
        for (auto& c : s)
          if (ss.r[static_cast<std::size_t>(k) * in.T + c.t] == c.i) v += in.value[c.i][j];
        v = std::min(v, B);
        sum += v;
        sq += v * v;
      }
      out.value = sum / ss.n;
      double var = ss.n > 1 ? (sq - ss.n * out.value * out.value) / (ss.n - 1) : 0.0;
      out.std_error = std::sqrt(std::max(0.0, var) / ss.n);
      break;
    }
  }
  return out;
}

namespace {

Violation best_adwords_violation(const Instance& in, const FractionalAllocation& x, int j, double tol,
                                 const VbarOptions& opt, int cap, double* se_out) {
  const bool large_only = opt.mode == VbarMode::LargeBidsExact;
  auto groups = support_by_step(in, x, j, tol, [&](int i) { return !large_only || is_large_bid(in, i, j); }, cap);
  const double B = in.budget[j];
  Violation best;
  best.amount = -std::numeric_limits<double>::infinity();
  double best_se = 0;
  std::vector<Cell> cur;
  McSamples mc;
  std::vector<double> partial;
  if (opt.mode == VbarMode::MonteCarlo) {
    mc = draw_samples(in, opt);
    partial.assign(mc.n, 0.0);
  }
  auto consider = [&](double X, double vbar, double se) {
    if (cur.empty()) return;
    if (X - vbar > best.amount) {
      best.amount = X - vbar;
      best.rhs = vbar;
      best.cells = cur;
      best_se = se;
    }
  };
  std::function<void(int, double, const Dist&, double, double, double)> dfs =
      [&](int t, double X, const Dist& d, double p0, double p1, double e1) {
        if (t == in.T) {
          double vbar = 0, se = 0;
          if (opt.mode == VbarMode::Exact) vbar = dist_mean(d);
          else if (opt.mode == VbarMode::LargeBidsExact) vbar = e1 + std::max(0.0, 1 - p0 - p1) * B;
          else {
            double sum = 0, sq = 0;
            for (double v : partial) {
              double c = std::min(v, B);
              sum += c;
              sq += c * c;
            }
            vbar = sum / mc.n;
            se = std::sqrt(std::max(0.0, (sq - mc.n * vbar * vbar) / std::max(1, mc.n - 1)) / mc.n);
          }
          consider(X, vbar, se);
          return;
        }
        const auto& g = groups[t];
        const int k = static_cast<int>(g.size());
        for (int m = 0; m < (1 << k); ++m) {
          double sx = 0, F = 0, V = 0;
          std::vector<std::pair<double, double>> arr;
          for (int b = 0; b < k; ++b)
            if (m >> b & 1) {
              const int i = g[b];
              sx += in.value[i][j] * x.at(t, i, j);
              F += in.prob[t][i];
              V += in.prob[t][i] * std::min(in.value[i][j], B);
              arr.push_back({in.prob[t][i], in.value[i][j]});
              cur.push_back({t, i});
            }
          if (opt.mode == VbarMode::Exact && static_cast<int>(cur.size()) > kVbarExactCap)
            throw CapExceeded("adwords separation: subset over exact v-bar cap");
          auto shift_partial = [&](double sign) {
            for (int s = 0; s < mc.n; ++s) {
              const int r = mc.r[static_cast<std::size_t>(s) * in.T + t];
              if (r == kNoArrival) continue;
              auto it = std::find(g.begin(), g.end(), r);
              if (it != g.end() && (m >> (it - g.begin()) & 1)) partial[s] += sign * in.value[r][j];
            }
          };
          if (opt.mode == VbarMode::MonteCarlo && m) shift_partial(1.0);
          if (opt.mode == VbarMode::Exact && m) {
            dfs(t + 1, X + sx, add_step(d, arr, B), p0, p1, e1);
          } else {
            dfs(t + 1, X + sx, d, p0 * (1 - F), p1 * (1 - F) + p0 * F, e1 * (1 - F) + p0 * V);
          }
          if (opt.mode == VbarMode::MonteCarlo && m) shift_partial(-1.0);
          for (int b = 0; b < k; ++b)
            if (m >> b & 1) cur.pop_back();
        }
      };
  dfs(0, 0.0, Dist{{0.0, 1.0}}, 1.0, 0.0, 0.0);
  if (best.cells.empty()) best.amount = 0;
  if (se_out) *se_out = best_se;
  return best;
}

}  // namespace

std::optional<Violation> adwords_separation(const Instance& in, const FractionalAllocation& x, int j, double tol,
                                            const VbarOptions& opt, int cap, bool* inconclusive) {
  require_adwords(in, "adwords_separation");
  if (j < 0 || j >= in.num_agents()) throw InvalidInput("adwords_separation: unknown agent");
  double se = 0;
  Violation v = best_adwords_violation(in, x, j, tol, opt, cap, &se);
  if (v.amount > tol + 3 * se) return v;
  if (v.amount > tol && inconclusive) *inconclusive = true;
  return std::nullopt;
}

std::pair<FractionalAllocation, LpSolveReport> solve_adwords_fluid_lp(const Instance& in, const LpOptions&) {
  require_adwords(in, "solve_adwords_fluid_lp");
  if (!validate(in).ok()) throw InvalidInput("solve_adwords_fluid_lp: invalid instance");
  VarMap v = build_vars(in);
  LinearProgram lp = adwords_base(in, v);
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) throw SolverFailure(std::string("fluid LP: ") + to_string(sol.status));
  LpSolveReport rep;
  rep.iterations = sol.iterations;
  rep.rounds = 1;
  auto x = to_allocation(in, v, sol.x);
  rep.objective = lp_objective(in, x);
  return {x, rep};
}

std::pair<FractionalAllocation, LpSolveReport> solve_adwords_lp(const Instance& in, const AdwordsLpOptions& opt) {
  require_adwords(in, "solve_adwords_lp");
  if (!validate(in).ok()) throw InvalidInput("solve_adwords_lp: invalid instance");
  VarMap v = build_vars(in);
  LinearProgram lp = adwords_base(in, v);
  auto sep = [&](const FractionalAllocation& x, int j, LpSolveReport& rep) {
    bool inc = false;
    auto r = adwords_separation(in, x, j, opt.tol, opt.vbar, opt.separation_cap, &inc);
    if (inc) rep.inconclusive = true;
    return r;
  };
  auto out = cutting_plane(in, std::move(lp), v, sep);
  out.second.max_violation = check_feasibility(in, out.first, opt.tol, opt.vbar).max_violation;
  return out;
}

LpSolveReport check_feasibility(const Instance& in, const FractionalAllocation& x, double tol,
                                const VbarOptions& vbar) {
  LpSolveReport rep;
  if (!x.matches(in)) throw InvalidInput("check_feasibility: allocation does not match instance");
  auto bump = [&](double v) { rep.max_violation = std::max(rep.max_violation, v); };
  for (int t = 0; t < in.T; ++t)
    for (int i = 0; i < in.num_types(); ++i) {
      double s = 0;
      for (int j = 0; j < in.num_agents(); ++j) {
        double v = x.at(t, i, j);
        bump(-v);
        if (v > 0 && !in.adjacent(i, j)) bump(v);
        s += v;
      }
      bump(s - in.prob[t][i]);
    }
  for (int j = 0; j < in.num_agents(); ++j) {
    try {
      if (in.problem == ProblemClass::AdWords) {
        double spend = 0;
        for (int t = 0; t < in.T; ++t)
          for (int i = 0; i < in.num_types(); ++i) spend += in.value[i][j] * x.at(t, i, j);
        bump(spend - in.budget[j]);
        double se = 0;
        auto v = best_adwords_violation(in, x, j, tol, vbar, kSeparationCap, &se);
        if (v.amount > tol && v.amount <= tol + 3 * se) rep.inconclusive = true;
        bump(v.amount - 3 * se);
      } else {
        bump(best_matching_violation(in, x, j, tol, kSeparationCap).amount);
      }
    } catch (const CapExceeded&) {
      rep.inconclusive = true;
    }
  }
  rep.objective = lp_objective(in, x);
  rep.converged = rep.max_violation <= tol;
  return rep;
}

}  // namespace socs
