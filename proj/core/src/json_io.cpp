#include "socs/json_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "socs/error.hpp"

namespace socs {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("write to '" + path + "' failed");
}

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("JSON schema error: ") + e.what());
  }
}

void check_version(const json& j) {
  if (j.contains("version") && j.at("version") != kFormatVersion)
    throw InvalidInput("unsupported format version " + j.at("version").dump());
}

const char* value_key(ProblemClass c) {
  switch (c) {
    case ProblemClass::AdWords: return "bids";
    case ProblemClass::DisplayAds: return "weights";
    default: return "edges";
  }
}

int type_index(const Instance& in, const std::string& id) {
  for (int i = 0; i < in.num_types(); ++i)
    if (in.type_ids[i] == id) return i;
  throw InvalidInput("unknown type '" + id + "'");
}

}  // namespace

std::string to_json(const Instance& in) {
  json j;
  j["version"] = kFormatVersion;
  j["class"] = to_string(in.problem);
  j["T"] = in.T;
  json agents = json::array();
  for (int a = 0; a < in.num_agents(); ++a) {
    json e{{"id", in.agent_ids[a]}};
    if (in.problem == ProblemClass::VertexWeighted) e["weight"] = in.agent_weight[a];
    if (in.problem == ProblemClass::AdWords) e["budget"] = in.budget[a];
    agents.push_back(e);
  }
  j["agents"] = agents;
  json types = json::array();
  for (int i = 0; i < in.num_types(); ++i) {
    json e{{"id", in.type_ids[i]}};
    if (in.is_matching()) {
      json edges = json::array();
      for (int a = 0; a < in.num_agents(); ++a)
        if (in.adjacent(i, a)) edges.push_back(in.agent_ids[a]);
      e["edges"] = edges;
    } else {
      json vals = json::object();
      for (int a = 0; a < in.num_agents(); ++a)
        if (in.adjacent(i, a)) vals[in.agent_ids[a]] = in.value[i][a];
      e[value_key(in.problem)] = vals;
    }
    types.push_back(e);
  }
  j["types"] = types;
  json arrivals = json::array();
  for (int t = 0; t < in.T; ++t) {
    json step = json::array();
    for (int i = 0; i < in.num_types(); ++i)
      if (in.prob[t][i] > 0) step.push_back({{"type", in.type_ids[i]}, {"prob", in.prob[t][i]}});
    arrivals.push_back(step);
  }
  j["arrivals"] = arrivals;
  return j.dump(2);
}

Instance instance_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    check_version(j);
    Instance in;
    in.problem = problem_class_from_string(j.at("class").get<std::string>());
    in.T = j.at("T").get<int>();
    for (const auto& a : j.at("agents")) {
      in.agent_ids.push_back(a.at("id").get<std::string>());
      if (in.problem == ProblemClass::VertexWeighted) in.agent_weight.push_back(a.at("weight").get<double>());
      if (in.problem == ProblemClass::AdWords) in.budget.push_back(a.at("budget").get<double>());
    }
    const int J = in.num_agents();
    for (const auto& t : j.at("types")) {
      in.type_ids.push_back(t.at("id").get<std::string>());
      std::vector<double> row(J, 0.0);
      const auto& v = t.at(value_key(in.problem));
      if (in.is_matching()) {
        for (const auto& id : v) row[in.agent_index(id.get<std::string>())] = 1.0;
      } else {
        for (auto it = v.begin(); it != v.end(); ++it) row[in.agent_index(it.key())] = it.value().get<double>();
      }
      in.value.push_back(row);
    }
    const auto& arr = j.at("arrivals");
    if (static_cast<int>(arr.size()) != in.T)
      throw InvalidInput("arrivals has " + std::to_string(arr.size()) + " steps, expected T=" + std::to_string(in.T));
    for (const auto& step : arr) {
      std::vector<double> p(in.num_types(), 0.0);
      for (const auto& e : step) p[type_index(in, e.at("type").get<std::string>())] += e.at("prob").get<double>();
      in.prob.push_back(p);
    }
    return in;
  });
}

std::string to_json(const Instance& in, const FractionalAllocation& x) {
  if (!x.matches(in)) throw InvalidInput("allocation does not match instance");
  json j;
  j["version"] = kFormatVersion;
  json xs = json::array();
  for (int t = 0; t < x.T; ++t)
    for (int i = 0; i < x.I; ++i)
      for (int a = 0; a < x.J; ++a)
        if (x.at(t, i, a) != 0.0)
          xs.push_back({{"t", t}, {"type", in.type_ids[i]}, {"agent", in.agent_ids[a]}, {"value", x.at(t, i, a)}});
  j["x"] = xs;
  return j.dump(2);
}

FractionalAllocation allocation_from_json(const Instance& in, const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    check_version(j);
    auto x = FractionalAllocation::zeros(in);
    for (const auto& e : j.at("x")) {
      const int t = e.at("t").get<int>();
      if (t < 0 || t >= in.T) throw InvalidInput("allocation entry with step out of range");
      x.at(t, type_index(in, e.at("type").get<std::string>()), in.agent_index(e.at("agent").get<std::string>())) =
          e.at("value").get<double>();
    }
    return x;
  });
}

std::string to_json(const Instance& in, const Matching& m) {
  json arr = json::array();
  for (const auto& e : m) {
    json o{{"t", e.t}, {"agent", in.agent_ids[e.agent]}};
    o["type"] = e.type >= 0 ? json(in.type_ids[e.type]) : json(nullptr);
    if (e.type >= 0 && in.problem != ProblemClass::Unweighted) o["weight"] = in.gain(e.type, e.agent);
    arr.push_back(o);
  }
  return arr.dump(2);
}

Matching matching_from_json(const Instance& in, const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    Matching m;
    for (const auto& e : j) {
      Match x;
      x.t = e.at("t").get<int>();
      x.type = e.at("type").is_null() ? kNoArrival : type_index(in, e.at("type").get<std::string>());
      x.agent = in.agent_index(e.at("agent").get<std::string>());
      m.push_back(x);
    }
    return m;
  });
}

std::string to_json(const QueryCommitInstance& qc) {
  json j{{"version", kFormatVersion}, {"I", qc.num_online}, {"J", qc.num_offline}, {"p", qc.p}};
  if (!qc.weight.empty()) j["weights"] = qc.weight;
  return j.dump(2);
}

QueryCommitInstance query_commit_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    check_version(j);
    QueryCommitInstance qc;
    qc.num_online = j.at("I").get<int>();
    qc.num_offline = j.at("J").get<int>();
    qc.p = j.at("p").get<std::vector<std::vector<double>>>();
    if (j.contains("weights")) qc.weight = j.at("weights").get<std::vector<double>>();
    return qc;
  });
}

std::string to_json(const AdversarialSequence& seq) {
  json j{{"version", kFormatVersion}};
  json agents = json::array();
  for (int a = 0; a < seq.num_agents(); ++a)
    agents.push_back({{"id", a < static_cast<int>(seq.agent_ids.size()) ? seq.agent_ids[a] : std::to_string(a)},
                      {"budget", seq.budget[a]}});
  j["agents"] = agents;
  j["bids"] = seq.bids;
  if (!seq.mu.empty()) j["mu"] = seq.mu;
  return j.dump(2);
}

AdversarialSequence adversarial_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    check_version(j);
    AdversarialSequence s;
    for (const auto& a : j.at("agents")) {
      s.agent_ids.push_back(a.at("id").get<std::string>());
      s.budget.push_back(a.at("budget").get<double>());
    }
    s.bids = j.at("bids").get<std::vector<std::vector<double>>>();
    if (j.contains("mu")) s.mu = j.at("mu").get<std::vector<std::vector<double>>>();
    return s;
  });
}

std::string to_json(const StatSummary& s) {
  auto est = [](const Estimate& e) {
    return json{{"mean", e.mean}, {"std_error", e.std_error}, {"ci99", {e.ci.lo, e.ci.hi}}};
  };
  json j{{"version", kFormatVersion},
         {"algorithm", to_string(s.algorithm)},
         {"benchmark", to_string(s.benchmark)},
         {"trials", s.trials},
         {"seed", s.seed}};
  json agents = json::array();
  for (const auto& a : s.agents) {
    json o{{"agent", a.agent}, {"level", a.level}, {"y", a.y}, {"miss", est(a.miss)}};
    if (a.exact) o["exact"] = *a.exact;
    agents.push_back(o);
  }
  j["agents"] = agents;
  j["alg_value"] = est(s.alg_value);
  j["benchmark_value"] = s.benchmark_value;
  j["ratio"] = est(s.ratio);
  return j.dump(2);
}

}  // namespace socs
