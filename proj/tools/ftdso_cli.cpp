#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "ftdso/budget.hpp"
#include "ftdso/campaign.hpp"
#include "ftdso/dso.hpp"
#include "ftdso/generators.hpp"
#include "ftdso/reference.hpp"

using namespace ftdso;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitThreshold = 2;
constexpr int kExitBudget = 3;

json dist_json(Dist d) { return d >= kInf ? json(nullptr) : json(d); }

// Flags shared by build and bench. Each one only overrides the base config
// when it was given on the command line.
struct ConfigFlags {
  std::string graph_file, generator;
  std::uint64_t graph_seed = 1;
  bool keep_all = false;
  int f = 2;
  double alpha = 0.4, eps = 1.0;
  int L = 0, lambda = 0;
  double C = 1, C_prime = 1, C_second = 1;
  std::uint64_t seed = 1;
  bool eager = false;
  std::int64_t budget = 0;
  int space_samples = 20;
  int queries = 100;
  std::uint64_t workload_seed = 1;
  int min_failures = 0, max_failures = -1;
  double path_bias = 0.7;
  double max_rate = 0.01;

  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> setters;

  template <class T>
  void bind(CLI::App* app, const std::string& name, T& var, const std::string& help,
            std::function<void(ExperimentConfig&)> apply) {
    setters.emplace_back(app->add_option(name, var, help), std::move(apply));
  }

  void add_graph(CLI::App* app) {
    bind(app, "--graph", graph_file, "DIMACS graph file", [this](ExperimentConfig& c) { c.graph.file = graph_file; });
    bind(app, "--gen", generator, "generator spec er:N:P | grid:W:H | rgg:N:R",
         [this](ExperimentConfig& c) { c.graph.generator = generator; });
    bind(app, "--graph-seed", graph_seed, "generator seed", [this](ExperimentConfig& c) { c.graph.seed = graph_seed; });
    setters.emplace_back(app->add_flag("--keep-all", keep_all, "do not reduce to the largest component"),
                         [this](ExperimentConfig& c) { c.graph.largest_component = !keep_all; });
  }

  void add_params(CLI::App* app) {
    bind(app, "--f", f, "sensitivity", [this](ExperimentConfig& c) { c.dso.f = f; });
    bind(app, "--alpha", alpha, "space/time trade-off in (0, 1/2)", [this](ExperimentConfig& c) { c.dso.alpha = alpha; });
    bind(app, "--eps", eps, "stretch slack in (0, 3)", [this](ExperimentConfig& c) { c.dso.eps = eps; });
    bind(app, "--L", L, "override the short-path threshold", [this](ExperimentConfig& c) { c.dso.L_override = L; });
    bind(app, "--lambda", lambda, "override the ball radius", [this](ExperimentConfig& c) { c.dso.lambda_override = lambda; });
    bind(app, "--C", C, "forest sampling constant", [this](ExperimentConfig& c) { c.dso.C = C; });
    bind(app, "--C-prime", C_prime, "pivot sampling constant", [this](ExperimentConfig& c) { c.dso.C_prime = C_prime; });
    bind(app, "--C-second", C_second, "new-pivot sampling constant",
         [this](ExperimentConfig& c) { c.dso.C_second = C_second; });
    bind(app, "--seed", seed, "master seed", [this](ExperimentConfig& c) { c.dso.seed = seed; });
    setters.emplace_back(app->add_flag("--eager", eager, "build every leaf oracle up front"),
                         [this](ExperimentConfig& c) { c.dso.lazy_leaves = !eager; });
    bind(app, "--budget", budget, "entry budget; exceeding it exits with code 3",
         [this](ExperimentConfig& c) { c.dso.entry_budget = budget; });
    bind(app, "--space-samples", space_samples, "FT-trees sampled for the space estimate (0 skips it)",
         [this](ExperimentConfig& c) { c.space_samples = space_samples; });
  }

  void add_workload(CLI::App* app) {
    bind(app, "--queries", queries, "number of queries", [this](ExperimentConfig& c) { c.workload.queries = queries; });
    bind(app, "--workload-seed", workload_seed, "workload seed",
         [this](ExperimentConfig& c) { c.workload.seed = workload_seed; });
    bind(app, "--min-failures", min_failures, "fewest failures per query",
         [this](ExperimentConfig& c) { c.workload.min_failures = min_failures; });
    bind(app, "--max-failures", max_failures, "most failures per query (default f)",
         [this](ExperimentConfig& c) { c.workload.max_failures = max_failures; });
    bind(app, "--path-bias", path_bias, "chance a failure lies on the s-t path",
         [this](ExperimentConfig& c) { c.workload.path_bias = path_bias; });
    bind(app, "--max-violation-rate", max_rate, "allowed share of stretch violations",
         [this](ExperimentConfig& c) { c.thresholds.max_stretch_violation_rate = max_rate; });
  }

  void apply(ExperimentConfig& c) const {
    for (const auto& [opt, fn] : setters)
      if (opt->count() > 0) fn(c);
  }
};

std::vector<EdgeId> parse_failures(const Graph& g, const std::string& text) {
  std::vector<EdgeId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(static_cast<EdgeId>(std::stol(item)));
    } else {
      const auto u = static_cast<Vertex>(std::stol(item.substr(0, dash)));
      const auto v = static_cast<Vertex>(std::stol(item.substr(dash + 1)));
      if (u < 0 || v < 0 || u >= g.n() || v >= g.n()) throw std::invalid_argument("vertex out of range in " + item);
      auto e = g.find_edge(u, v);
      if (!e) throw std::invalid_argument("no edge " + item);
      out.push_back(*e);
    }
  }
  return out;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

json space_json(const SpaceReport& s) {
  return json{{"forest", s.forest},   {"pivots", s.pivots},     {"balls", s.balls},
              {"lca", s.lca},         {"ft_trees", s.ft_trees}, {"ft_pairs", s.ft_pairs},
              {"total", s.total()},   {"apsp_excluded", s.apsp}};
}

json params_json(const DsoParams& p) {
  return json{{"n", p.n},         {"f", p.f},           {"alpha", p.alpha},
              {"eps", p.eps},     {"L", p.L},           {"lambda", p.lambda},
              {"granularity", p.granularity}, {"degenerate", p.degenerate}, {"ball_cap", p.ball_cap}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate distance sensitivity oracle for edge failures"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  // generate
  auto* gen = app.add_subcommand("generate", "write a generated graph in DIMACS format");
  std::string gen_spec, gen_out;
  std::uint64_t gen_seed = 1;
  bool gen_connected = false;
  gen->add_option("--spec", gen_spec, "er:N:P | grid:W:H | rgg:N:R")->required();
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_flag("--connected", gen_connected, "keep the largest component only");
  gen->add_option("--out", gen_out, "output file (stdout if omitted)");

  // build
  auto* build = app.add_subcommand("build", "build an oracle and serialize it");
  ConfigFlags bflags;
  bflags.add_graph(build);
  bflags.add_params(build);
  std::string build_out;
  build->add_option("--out", build_out, "oracle file")->required();

  // query
  auto* query = app.add_subcommand("query", "answer one query against a saved oracle");
  std::string q_oracle, q_fail;
  Vertex q_s = 0, q_t = 0;
  bool q_no_exact = false;
  query->add_option("--oracle", q_oracle, "oracle file")->required();
  query->add_option("--s", q_s, "source")->required();
  query->add_option("--t", q_t, "target")->required();
  query->add_option("--fail", q_fail, "failed edges: ids or u-v pairs, comma separated");
  query->add_flag("--no-exact", q_no_exact, "skip the exact replacement distance");

  // verify
  auto* verify = app.add_subcommand("verify", "run a workload against a saved oracle and check it");
  ConfigFlags vflags;
  std::string v_oracle, v_report;
  verify->add_option("--oracle", v_oracle, "oracle file")->required();
  verify->add_option("--report", v_report, "write the JSON report here");
  vflags.add_workload(verify);

  // bench
  auto* bench = app.add_subcommand("bench", "build, measure and verify; writes report.json, report.csv, timings.json");
  ConfigFlags cflags;
  std::string c_config, c_dir = ".";
  bench->add_option("--config", c_config, "experiment config (JSON)");
  bench->add_option("--out-dir", c_dir, "output directory");
  cflags.add_graph(bench);
  cflags.add_params(bench);
  cflags.add_workload(bench);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Graph g = generate_from_spec(gen_spec, gen_seed, gen_connected);
      if (gen_out.empty()) {
        write_dimacs(g, std::cout);
      } else {
        std::ofstream out(gen_out);
        if (!out) throw std::runtime_error("cannot write " + gen_out);
        write_dimacs(g, out);
      }
      return kExitOk;
    }

    if (*build) {
      ExperimentConfig c;
      bflags.apply(c);
      validate(c);
      Graph g = load_graph(c.graph);
      c.dso.threads = threads;
      auto dso = Dso::build(g, c.dso);
      dso->save(build_out);
      json j{{"oracle", build_out},
             {"graph", {{"n", g.n()}, {"m", g.m()}}},
             {"params", params_json(dso->params())},
             {"build_seconds", dso->build_seconds()}};
      if (c.space_samples > 0) j["space_words"] = space_json(dso->measure_space(c.space_samples));
      std::cout << j.dump(2) << '\n';
      return kExitOk;
    }

    if (*query) {
      auto dso = Dso::load(q_oracle);
      const Graph& g = dso->graph();
      FailureSet F(parse_failures(g, q_fail));
      auto r = dso->query(q_s, q_t, F);
      json j{{"s", q_s}, {"t", q_t}, {"F", F.edges}, {"answer", dist_json(r.answer)}, {"case", r.case_label}};
      if (!q_no_exact) {
        const Dist exact = exact_replacement(g, q_s, q_t, F);
        j["exact"] = dist_json(exact);
        if (exact < kInf && r.answer < kInf && exact > 0)
          j["stretch"] = static_cast<double>(r.answer) / static_cast<double>(exact);
        else
          j["stretch"] = exact == 0 && r.answer == 0 ? json(1.0) : json(nullptr);
      }
      std::cout << j.dump() << '\n';
      return kExitOk;
    }

    if (*verify) {
      auto dso = Dso::load(v_oracle);
      ExperimentConfig c;
      c.dso = dso->config();
      c.graph.file = v_oracle;  // the graph travels inside the oracle file
      vflags.apply(c);
      validate(c);
      Report R;
      R.config = c;
      R.n = dso->graph().n();
      R.m = dso->graph().m();
      R.params = dso->params();
      R.records = sample_workload(dso->graph(), c.workload, c.dso.f);
      R.summary = run_workload(*dso, R.records, c.thresholds, threads);
      json j = report_json(R);
      if (!v_report.empty()) write_text(v_report, j.dump(2) + "\n");
      std::cout << j["summary"].dump(2) << '\n';
      return R.summary.passed ? kExitOk : kExitThreshold;
    }

    if (*bench) {
      ExperimentConfig c;
      if (!c_config.empty()) {
        std::ifstream in(c_config);
        if (!in) throw std::runtime_error("cannot read " + c_config);
        c = json::parse(in).get<ExperimentConfig>();
      }
      cflags.apply(c);
      validate(c);
      Report R = run_campaign(c, threads);
      std::filesystem::create_directories(c_dir);
      const std::filesystem::path dir(c_dir);
      write_text(dir / "report.json", report_json(R).dump(2) + "\n");
      write_text(dir / "report.csv", report_csv(R));
      write_text(dir / "timings.json", timings_json(R).dump(2) + "\n");
      json s = report_json(R)["summary"];
      std::cout << s.dump(2) << '\n';
      return R.summary.passed ? kExitOk : kExitThreshold;
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
