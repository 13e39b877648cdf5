#include "socs/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "socs/error.hpp"
#include "socs/hungarian.hpp"

namespace socs {

const char* to_string(ProblemClass c) {
  switch (c) {
    case ProblemClass::Unweighted: return "Unweighted";
    case ProblemClass::VertexWeighted: return "VertexWeighted";
    case ProblemClass::AdWords: return "AdWords";
    case ProblemClass::DisplayAds: return "DisplayAds";
  }
  return "?";
}

ProblemClass problem_class_from_string(const std::string& s) {
  for (auto c : {ProblemClass::Unweighted, ProblemClass::VertexWeighted, ProblemClass::AdWords,
                 ProblemClass::DisplayAds})
    if (s == to_string(c)) return c;
  throw InvalidInput("unknown problem class '" + s + "'");
}

double Instance::gain(int i, int j) const {
  switch (problem) {
    case ProblemClass::Unweighted: return adjacent(i, j) ? 1.0 : 0.0;
    case ProblemClass::VertexWeighted: return adjacent(i, j) ? agent_weight[j] : 0.0;
    case ProblemClass::AdWords:
    case ProblemClass::DisplayAds: return value[i][j];
  }
  return 0.0;
}

double Instance::y_scale(int i, int j) const {
  if (!adjacent(i, j)) return 0.0;
  return problem == ProblemClass::AdWords ? value[i][j] / budget[j] : 1.0;
}

int Instance::agent_index(const std::string& id) const {
  for (int j = 0; j < num_agents(); ++j)
    if (agent_ids[j] == id) return j;
  throw InvalidInput("unknown agent '" + id + "'");
}

FractionalAllocation FractionalAllocation::zeros(const Instance& inst) {
  FractionalAllocation a;
  a.T = inst.T;
  a.I = inst.num_types();
  a.J = inst.num_agents();
  a.x.assign(static_cast<std::size_t>(a.T) * a.I * a.J, 0.0);
  return a;
}

std::vector<double> FractionalAllocation::mu(const Instance& inst, int t, int i) const {
  std::vector<double> m(J, 0.0);
  const double f = inst.prob[t][i];
  if (f <= 0) return m;
  for (int j = 0; j < J; ++j) m[j] = at(t, i, j) / f;
  return m;
}

bool FractionalAllocation::matches(const Instance& inst) const {
  return T == inst.T && I == inst.num_types() && J == inst.num_agents() &&
         x.size() == static_cast<std::size_t>(T) * I * J;
}

namespace {
template <class... A>
std::string cat(A&&... a) {
  std::ostringstream os;
  (os << ... << a);
  return os.str();
}
}  // namespace

ValidationReport validate(const Instance& in) {
  ValidationReport r;
  auto& v = r.violations;
  const int I = in.num_types(), J = in.num_agents();
  if (in.T < 1) v.push_back("T must be at least 1");
  if (J < 1) v.push_back("at least one agent required");
  if (static_cast<int>(in.prob.size()) != in.T)
    v.push_back(cat("arrival distribution has ", in.prob.size(), " steps, expected T=", in.T));
  if (static_cast<int>(in.value.size()) != I)
    v.push_back(cat("value table has ", in.value.size(), " rows, expected ", I, " types"));
  for (int i = 0; i < static_cast<int>(in.value.size()); ++i) {
    if (static_cast<int>(in.value[i].size()) != J) {
      v.push_back(cat("type ", in.type_ids[i], ": value row has wrong length"));
      continue;
    }
    for (int j = 0; j < J; ++j) {
      double x = in.value[i][j];
      if (!std::isfinite(x) || x < 0)
        v.push_back(cat("negative or non-finite value at type ", in.type_ids[i], ", agent ", in.agent_ids[j]));
      else if (in.is_matching() && x != 0.0 && x != 1.0)
        v.push_back(cat("edge indicator must be 0 or 1 at type ", in.type_ids[i], ", agent ", in.agent_ids[j]));
    }
  }
  if (in.problem == ProblemClass::VertexWeighted) {
    if (static_cast<int>(in.agent_weight.size()) != J) v.push_back("vertex weights missing");
    else
      for (int j = 0; j < J; ++j)
        if (!(in.agent_weight[j] > 0)) v.push_back(cat("vertex weight must be positive for agent ", in.agent_ids[j]));
  }
  if (in.problem == ProblemClass::AdWords) {
    if (static_cast<int>(in.budget.size()) != J) v.push_back("budgets missing");
    else
      for (int j = 0; j < J; ++j)
        if (!(in.budget[j] > 0)) v.push_back(cat("budget must be positive for agent ", in.agent_ids[j]));
  }
  for (int t = 0; t < static_cast<int>(in.prob.size()); ++t) {
    if (static_cast<int>(in.prob[t].size()) != I) {
      v.push_back(cat("arrival distribution at t=", t + 1, " has wrong length"));
      continue;
    }
    double s = 0;
    for (int i = 0; i < I; ++i) {
      double f = in.prob[t][i];
      if (!(f >= -kProbTol && f <= 1 + kProbTol))
        v.push_back(cat("probability out of range at t=", t + 1, ", type ", in.type_ids[i]));
      s += f;
    }
    if (s > 1 + kProbTol) v.push_back(cat("probabilities sum to ", s, " > 1 at t=", t + 1));
  }
  return r;
}

ValidationReport validate(const QueryCommitInstance& qc) {
  ValidationReport r;
  if (qc.num_online < 1 || qc.num_offline < 1) r.violations.push_back("vertex sets must be non-empty");
  if (static_cast<int>(qc.p.size()) != qc.num_online) r.violations.push_back("p has wrong number of rows");
  for (int i = 0; i < static_cast<int>(qc.p.size()); ++i) {
    if (static_cast<int>(qc.p[i].size()) != qc.num_offline) {
      r.violations.push_back(cat("p row ", i, " has wrong length"));
      continue;
    }
    for (int j = 0; j < qc.num_offline; ++j)
      if (!(qc.p[i][j] >= 0 && qc.p[i][j] <= 1))
        r.violations.push_back(cat("edge probability out of range at (", i, ",", j, ")"));
  }
  if (!qc.weight.empty()) {
    if (static_cast<int>(qc.weight.size()) != qc.num_offline) r.violations.push_back("weights have wrong length");
    for (double w : qc.weight)
      if (!(w > 0)) r.violations.push_back("offline weights must be positive");
  }
  return r;
}

ArrivalSequence sample_arrivals(const Instance& in, Rng& rng) {
  ArrivalSequence a;
  a.types.assign(in.T, kNoArrival);
  for (int t = 0; t < in.T; ++t) {
    double u = rng.uniform();
    double acc = 0;
    for (int i = 0; i < in.num_types(); ++i) {
      acc += in.prob[t][i];
      if (u < acc) {
        a.types[t] = i;
        break;
      }
    }
  }
  return a;
}

ArrivalSequence sample_arrivals(const Instance& in, std::uint64_t seed, std::uint64_t trial) {
  if (!validate(in).ok()) throw InvalidInput("sample_arrivals: invalid instance");
  Rng rng(seed, trial, Stream::Arrival);
  return sample_arrivals(in, rng);
}

double cumulative_allocation_between(const Instance& in, const FractionalAllocation& x, int agent,
                                     int t_begin, int t_end, std::optional<double> level) {
  if (agent < 0 || agent >= in.num_agents()) throw InvalidInput("cumulative_allocation: unknown agent");
  if (!x.matches(in)) throw InvalidInput("cumulative_allocation: allocation does not match instance");
  double y = 0;
  for (int t = std::max(0, t_begin); t < std::min(t_end, in.T); ++t)
    for (int i = 0; i < in.num_types(); ++i) {
      if (level && in.value[i][agent] < *level) continue;
      y += x.at(t, i, agent) * in.y_scale(i, agent);
    }
  return y;
}

double cumulative_allocation(const Instance& in, const FractionalAllocation& x, int agent, int horizon,
                             std::optional<double> level) {
  return cumulative_allocation_between(in, x, agent, 0, horizon < 0 ? in.T : horizon, level);
}

namespace {

double adwords_opt(const Instance& in, const std::vector<int>& items) {
  const int n = static_cast<int>(items.size());
  if (n > kAdWordsBruteForceCap) throw CapExceeded("AdWords hindsight optimum: too many realized items");
  const int full = 1 << n;
  std::vector<double> dp(full, 0.0), next(full), val(full);
  for (int j = 0; j < in.num_agents(); ++j) {
    val[0] = 0;
    for (int m = 1; m < full; ++m) {
      int low = __builtin_ctz(m);
      val[m] = val[m & (m - 1)] + in.value[items[low]][j];
    }
    for (int m = 0; m < full; ++m) val[m] = std::min(val[m], in.budget[j]);
    for (int m = 0; m < full; ++m) {
      double best = dp[m];
      for (int s = m; s; s = (s - 1) & m) best = std::max(best, dp[m ^ s] + val[s]);
      next[m] = best;
    }
    dp.swap(next);
  }
  return dp[full - 1];
}

}  // namespace

double hindsight_optimum(const Instance& in, const ArrivalSequence& a) {
  if (static_cast<int>(a.types.size()) != in.T) throw InvalidInput("arrival sequence length differs from T");
  std::vector<int> items;
  for (int i : a.types) {
    if (i == kNoArrival) continue;
    if (i < 0 || i >= in.num_types()) throw InvalidInput("arrival sequence references unknown type");
    items.push_back(i);
  }
  if (items.empty()) return 0.0;
  if (in.problem == ProblemClass::AdWords) return adwords_opt(in, items);
  std::vector<std::vector<double>> w(items.size(), std::vector<double>(in.num_agents()));
  for (std::size_t r = 0; r < items.size(); ++r)
    for (int j = 0; j < in.num_agents(); ++j) w[r][j] = in.gain(items[r], j);
  return max_weight_matching(w).value;
}

Instance generate(const GeneratorSpec& g) {
  if (g.num_types < 1 || g.num_agents < 1 || g.T < 1) throw InvalidInput("generate: sizes must be >= 1");
  Rng r(g.seed, 0, Stream::Generate);
  Instance in;
  in.problem = g.problem;
  in.T = g.T;
  for (int j = 0; j < g.num_agents; ++j) in.agent_ids.push_back("a" + std::to_string(j + 1));
  for (int i = 0; i < g.num_types; ++i) in.type_ids.push_back("i" + std::to_string(i + 1));
  if (g.problem == ProblemClass::VertexWeighted)
    for (int j = 0; j < g.num_agents; ++j) in.agent_weight.push_back(0.5 + 1.5 * r.uniform());
  if (g.problem == ProblemClass::AdWords)
    for (int j = 0; j < g.num_agents; ++j) in.budget.push_back(1.0 + r.uniform());
  in.value.assign(g.num_types, std::vector<double>(g.num_agents, 0.0));
  for (int i = 0; i < g.num_types; ++i)
    for (int j = 0; j < g.num_agents; ++j) {
      if (!(r.uniform() < g.density)) continue;
      switch (g.problem) {
        case ProblemClass::Unweighted:
        case ProblemClass::VertexWeighted: in.value[i][j] = 1.0; break;
        case ProblemClass::AdWords: in.value[i][j] = in.budget[j] * (0.05 + 0.95 * r.uniform()); break;
        case ProblemClass::DisplayAds: in.value[i][j] = 0.1 + 0.9 * r.uniform(); break;
      }
    }
  in.prob.assign(g.T, std::vector<double>(g.num_types, 0.0));
  for (int t = 0; t < g.T; ++t) {
    double mass = 0.5 + 0.5 * r.uniform();
    std::vector<double> w(g.num_types);
    double s = 0;
    for (auto& v : w) s += (v = -std::log(1.0 - r.uniform()));
    for (int i = 0; i < g.num_types; ++i) in.prob[t][i] = mass * w[i] / s;
  }
  return in;
}

QueryCommitInstance generate_query_commit(int num_online, int num_offline, double density,
                                          std::uint64_t seed, bool weighted) {
  if (num_online < 1 || num_offline < 1) throw InvalidInput("generate_query_commit: sizes must be >= 1");
  Rng r(seed, 1, Stream::Generate);
  QueryCommitInstance qc;
  qc.num_online = num_online;
  qc.num_offline = num_offline;
  qc.p.assign(num_online, std::vector<double>(num_offline, 0.0));
  for (auto& row : qc.p)
    for (auto& p : row)
      if (r.uniform() < density) p = 0.1 + 0.9 * r.uniform();
  if (weighted)
    for (int j = 0; j < num_offline; ++j) qc.weight.push_back(0.5 + 1.5 * r.uniform());
  return qc;
}

}  // namespace socs
