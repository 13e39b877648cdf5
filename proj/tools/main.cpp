// socs-lab: command-line front end for the socs core library.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socs/error.hpp"
#include "socs/harness.hpp"
#include "socs/json_io.hpp"
#include "socs/lp.hpp"
#include "socs/matching.hpp"
#include "socs/oracles.hpp"
#include "socs/query_commit.hpp"
#include "socs/rates.hpp"
#include "socs/type_decomposition.hpp"

namespace {

using nlohmann::json;

struct Common {
  std::uint64_t seed = 1;
  long trials = 10000;
  std::string out;
  std::string format = "csv";
  double tol = 1e-9;
};

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) std::cout << text;
  else socs::write_text_file(c.out, text);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  return v;
}

int verdict(bool ok) {
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? 0 : 1;
}

int cmd_gen(const Common& c, const std::string& cls, int types, int agents, int T, double density, bool qc) {
  if (qc) {
    emit(c, socs::to_json(socs::generate_query_commit(types, agents, density, c.seed, cls == "VertexWeighted")) + "\n");
    return 0;
  }
  socs::GeneratorSpec spec{socs::problem_class_from_string(cls), types, agents, T, density, c.seed};
  emit(c, socs::to_json(socs::generate(spec)) + "\n");
  return 0;
}

int cmd_validate(const std::string& path, bool qc) {
  const std::string text = socs::read_text_file(path);
  socs::ValidationReport r = qc ? socs::validate(socs::query_commit_from_json(text))
                                : socs::validate(socs::instance_from_json(text));
  for (const auto& v : r.violations) std::cout << "violation: " << v << '\n';
  return verdict(r.ok());
}

int cmd_lp_solve(const Common& c, const std::string& path, const std::string& vbar) {
  auto in = socs::instance_from_json(socs::read_text_file(path));
  auto rep = socs::validate(in);
  if (!rep.ok()) throw socs::InvalidInput(rep.violations.front());
  socs::AdwordsLpOptions opt;
  opt.tol = c.tol;
  if (vbar == "exact") opt.vbar.mode = socs::VbarMode::Exact;
  else if (vbar == "mc") opt.vbar.mode = socs::VbarMode::MonteCarlo;
  opt.vbar.seed = c.seed;
  auto e = socs::prepare_experiment(in, opt);
  auto audit = socs::check_feasibility(in, e.x, c.tol, opt.vbar);
  if (c.format == "json") {
    emit(c, socs::to_json(in, e.x) + "\n");
  } else {
    std::ostringstream os;
    os.precision(12);
    os << "objective," << e.lp_value << "\nmax_violation," << audit.max_violation << "\ninconclusive,"
       << (audit.inconclusive ? 1 : 0) << '\n';
    emit(c, os.str());
  }
  std::cerr << "objective " << e.lp_value << ", post-solve max violation " << audit.max_violation << '\n';
  return audit.max_violation <= c.tol ? 0 : 1;
}

int cmd_decompose(const Common& c, const std::string& mu_text) {
  const auto mu = parse_list(mu_text);
  const auto dist = socs::surrogate_distribution(mu);
  const double res = socs::conservation_residual(mu, 1.0, dist);
  auto name = [](int j) { return j == socs::kBottom ? std::string("bottom") : std::to_string(j); };
  if (c.format == "json") {
    json arr = json::array();
    for (const auto& o : dist)
      arr.push_back({{"kind", o.type.two_way ? "TwoWay" : "OneWay"},
                     {"agents", o.type.two_way ? json{name(o.type.a), name(o.type.b)} : json{name(o.type.a)}},
                     {"prob", o.prob}});
    emit(c, json{{"outcomes", arr}, {"conservation_residual", res}}.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os.precision(12);
    os << "kind,a,b,prob\n";
    for (const auto& o : dist)
      os << (o.type.two_way ? "TwoWay" : "OneWay") << ',' << name(o.type.a) << ','
         << (o.type.two_way ? name(o.type.b) : "") << ',' << o.prob << '\n';
    os << "# conservation_residual=" << res << '\n';
    emit(c, os.str());
  }
  return res <= 1e-12 ? 0 : 1;
}

int cmd_simulate(const Common& c, const std::string& path, const std::string& alg, const std::string& bench,
                 int threads) {
  socs::ExperimentConfig cfg;
  cfg.instance_path = path;
  cfg.algorithm = socs::algorithm_kind_from_string(alg);
  cfg.trials = c.trials;
  cfg.seed = c.seed;
  cfg.benchmark = socs::benchmark_from_string(bench);
  cfg.threads = threads;
  auto s = socs::monte_carlo(cfg);
  auto v = socs::compare_to_rate(s, socs::RateCurve{socs::rate_kind_for(cfg.algorithm)});
  emit(c, c.format == "json" ? socs::to_json(s) + "\n" : socs::to_csv(s) + socs::to_csv(v));
  return socs::all_pass(v) ? 0 : 1;
}

int cmd_rates_dump(const Common& c, const std::string& kind, const std::string& grid, double cc) {
  const auto k = socs::rate_kind_from_string(kind);
  double a = 0, b = 1, h = 0.01;
  if (std::sscanf(grid.c_str(), "%lf:%lf:%lf", &a, &b, &h) != 3 || !(h > 0) || b < a)
    throw CLI::ValidationError("--grid", "expected start:stop:step");
  std::ostringstream os;
  os.precision(12);
  os << "y,g,one_minus_g\n";
  const long n = std::lround((b - a) / h);
  for (long s = 0; s <= n; ++s) {
    const double y = a + s * h;
    const double g = socs::convergence_rate(k, y, cc);
    os << y << ',' << g << ',' << 1 - g << '\n';
  }
  emit(c, os.str());
  return 0;
}

int cmd_appendix_b(double step) {
  bool ok = true;
  for (const auto& r : socs::appendix_b_checks(step)) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " worst=" << r.worst << ' ' << r.detail << '\n';
    ok = ok && r.pass;
  }
  return verdict(ok);
}

int cmd_converse_jensen(const Common& c, const std::vector<std::string>& files, int corpus) {
  std::vector<socs::Instance> inst;
  for (const auto& f : files) inst.push_back(socs::instance_from_json(socs::read_text_file(f)));
  for (int r = 0; r < corpus; ++r) {
    const auto cls = r % 3 == 0 ? socs::ProblemClass::Unweighted
                     : r % 3 == 1 ? socs::ProblemClass::VertexWeighted
                                  : socs::ProblemClass::DisplayAds;
    inst.push_back(socs::generate({cls, 3 + r % 3, 3 + r % 2, 2 + r % 4, 0.6, c.seed + r}));
  }
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& in : inst) {
    if (in.problem == socs::ProblemClass::AdWords) continue;
    auto [x, rep] = socs::solve_matching_lp(in, {c.tol});
    worst = std::min(worst, socs::converse_jensen_sweep(in, x));
  }
  std::cout << "instances=" << inst.size() << " min(rhs-lhs)=" << worst << '\n';
  return verdict(worst >= -socs::kConverseJensenTol);
}

int cmd_oracles(const Common& c, int count) {
  double max_delta = 0, worst_z = 0;
  bool props = true;
  for (int r = 0; r < count; ++r) {
    const int J = 2 + r % 4, T = 1 + r % 6;
    auto tw = socs::random_two_way(J, T, c.seed * 1000 + r);
    auto tab = socs::recurrence_table(tw);
    for (const auto& chk : socs::table_property_checks(tw, tab)) props = props && chk.pass;
    auto [in, x] = socs::realize_two_way(tw);
    auto dp = socs::exact_state_dp(in, x, socs::DpAlgorithm::GeneralMatching);
    for (int j = 0; j < J; ++j) max_delta = std::max(max_delta, std::abs(dp.unmatched[j] - tab.singleton(T, j)));
    if (c.trials > 0) {
      auto e = socs::Experiment{in, x, 0.0, std::nullopt};
      auto s = socs::monte_carlo(e, socs::AlgorithmKind::GeneralMatching, c.trials, c.seed + r);
      for (const auto& a : s.agents) {
        const double p = dp.unmatched[a.agent];
        // variance floor of one event in n keeps exact 0/1 probabilities from dividing by zero
        const double n = static_cast<double>(c.trials), q = std::clamp(p, 1.0 / n, 1.0 - 1.0 / n);
        const double sd = std::sqrt(q * (1 - q) / n);
        worst_z = std::max(worst_z, std::abs(a.miss.mean - p) / sd);
      }
    }
  }
  std::cout << "instances=" << count << " max|dp-recurrence|=" << max_delta << " max|mc-dp|/sigma=" << worst_z
            << " table-properties=" << (props ? "ok" : "violated") << '\n';
  return verdict(max_delta <= 1e-12 && worst_z <= 4.0 && props);
}

int cmd_qc_run(const Common& c, const std::string& path) {
  auto qc = socs::query_commit_from_json(socs::read_text_file(path));
  socs::QcModel model(qc, {c.tol});
  socs::ProbePlanCache cache;
  double sum = 0, sum2 = 0, err = 0;
  for (long t = 0; t < c.trials; ++t) {
    socs::TrialRng rng(c.seed, static_cast<std::uint64_t>(t));
    auto out = socs::run_query_commit(model, rng, &cache);
    const double v = socs::matched_value(qc, out.matching);
    sum += v;
    sum2 += v * v;
    err = std::max(err, out.max_marginal_error);
  }
  const double n = static_cast<double>(c.trials), mean = sum / n;
  const double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
  const double lp = model.lp_report().objective;
  std::ostringstream os;
  os.precision(10);
  os << "alg_value,std_error,lp_value,ratio,max_marginal_error\n"
     << mean << ',' << se << ',' << lp << ',' << (lp > 0 ? mean / lp : 1.0) << ',' << err << '\n';
  emit(c, os.str());
  const double bound = socs::ratio_constant(socs::RateKind::RandomOrderMatching);
  return verdict(err <= 1e-10 && (lp <= 0 || (mean + socs::kRateSigmas * se) / lp >= bound));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"socs-lab: stochastic online correlated selection experiments"};
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* s) {
    s->add_option("--seed", c.seed, "base seed");
    s->add_option("--trials", c.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    s->add_option("--out", c.out, "output file (default stdout)");
    s->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--tol", c.tol, "numeric tolerance");
  };

  std::string cls = "Unweighted", path, alg = "GeneralMatching", bench = "LP", mu, kind = "GeneralMatching",
              grid = "0:1:0.01", vbar = "large";
  int types = 4, agents = 3, T = 4, threads = 0, corpus = 30, count = 100;
  double density = 0.5, cval = socs::kGeneralAdWordsC, step = 1e-3;
  bool qc = false;
  std::vector<std::string> files;

  auto* gen = app.add_subcommand("gen", "generate a random instance");
  common(gen);
  gen->add_option("--class", cls, "Unweighted, VertexWeighted, AdWords, DisplayAds");
  gen->add_option("--types", types, "online types (online vertices with --qc)");
  gen->add_option("--agents", agents, "agents (offline vertices with --qc)");
  gen->add_option("--T", T, "steps");
  gen->add_option("--density", density, "edge density");
  gen->add_flag("--qc", qc, "query-commit instance");

  auto* val = app.add_subcommand("validate", "check an instance file");
  val->add_option("file", path)->required();
  val->add_flag("--qc", qc, "query-commit instance");

  auto* lp = app.add_subcommand("lp", "LP relaxations");
  lp->require_subcommand(1);
  auto* solve = lp->add_subcommand("solve", "solve the instance's LP");
  common(solve);
  solve->add_option("file", path)->required();
  solve->add_option("--vbar", vbar, "AdWords v-bar: large, exact, mc")->check(CLI::IsMember({"large", "exact", "mc"}));

  auto* dec = app.add_subcommand("decompose", "type decomposition of one allocation vector");
  common(dec);
  dec->add_option("--mu", mu, "comma-separated allocation")->required();

  auto* sim = app.add_subcommand("simulate", "Monte Carlo run with rate comparison");
  common(sim);
  sim->add_option("file", path)->required();
  sim->add_option("--algorithm", alg, "algorithm kind");
  sim->add_option("--benchmark", bench, "LP, HindsightMC, ExactDP");
  sim->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* rates = app.add_subcommand("rates", "convergence-rate curves");
  rates->require_subcommand(1);
  auto* dump = rates->add_subcommand("dump", "CSV of g on a grid");
  common(dump);
  dump->add_option("--kind", kind, "rate kind");
  dump->add_option("--grid", grid, "start:stop:step");
  dump->add_option("--c", cval, "GeneralAdWords constant");

  auto* verify = app.add_subcommand("verify", "numeric certifications");
  verify->require_subcommand(1);
  auto* vb = verify->add_subcommand("appendix-b", "univariate inequality and concavity checks");
  vb->add_option("--step", step, "grid step");
  auto* vcj = verify->add_subcommand("converse-jensen", "Converse Jensen sweep over LP solutions");
  common(vcj);
  vcj->add_option("files", files, "instance files");
  vcj->add_option("--corpus", corpus, "random instances to add");
  auto* vo = verify->add_subcommand("oracles", "recurrence vs exact DP vs Monte Carlo");
  common(vo);
  vo->add_option("--count", count, "random two-way instances");

  auto* qcc = app.add_subcommand("qc", "query-commit model");
  qcc->require_subcommand(1);
  auto* qrun = qcc->add_subcommand("run", "probe-and-commit simulation");
  common(qrun);
  qrun->add_option("file", path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(c, cls, types, agents, T, density, qc);
    if (val->parsed()) return cmd_validate(path, qc);
    if (solve->parsed()) return cmd_lp_solve(c, path, vbar);
    if (dec->parsed()) return cmd_decompose(c, mu);
    if (sim->parsed()) return cmd_simulate(c, path, alg, bench, threads);
    if (dump->parsed()) return cmd_rates_dump(c, kind, grid, cval);
    if (vb->parsed()) return cmd_appendix_b(step);
    if (vcj->parsed()) return cmd_converse_jensen(c, files, corpus);
    if (vo->parsed()) return cmd_oracles(c, count);
    if (qrun->parsed()) return cmd_qc_run(c, path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const socs::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
