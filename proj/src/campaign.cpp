#include "ftdso/campaign.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ftdso/generators.hpp"
#include "ftdso/reference.hpp"
#include "ftdso/rng.hpp"

namespace ftdso {

using nlohmann::json;

namespace {

json dist_json(Dist d) { return d >= kInf ? json(nullptr) : json(d); }

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw std::invalid_argument(std::string("unknown key '") + it.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const ExperimentConfig& c) {
  const auto& d = c.dso;
  j = json{
      {"graph",
       {{"file", c.graph.file},
        {"generator", c.graph.generator},
        {"seed", c.graph.seed},
        {"largest_component", c.graph.largest_component}}},
      {"params",
       {{"f", d.f},
        {"alpha", d.alpha},
        {"eps", d.eps},
        {"k", 2},
        {"L", d.L_override ? json(*d.L_override) : json(nullptr)},
        {"lambda", d.lambda_override ? json(*d.lambda_override) : json(nullptr)},
        {"C", d.C},
        {"C_prime", d.C_prime},
        {"C_second", d.C_second},
        {"lazy_leaves", d.lazy_leaves},
        {"budget", d.entry_budget}}},
      {"seed", d.seed},
      {"workload",
       {{"queries", c.workload.queries},
        {"seed", c.workload.seed},
        {"min_failures", c.workload.min_failures},
        {"max_failures", c.workload.max_failures},
        {"path_bias", c.workload.path_bias}}},
      {"thresholds", {{"max_stretch_violation_rate", c.thresholds.max_stretch_violation_rate}}},
      {"space_samples", c.space_samples},
  };
}

void from_json(const json& j, ExperimentConfig& c) {
  try {
    check_keys(j, "config", {"graph", "params", "seed", "workload", "thresholds", "space_samples"});
    if (j.contains("graph")) {
      const auto& g = j.at("graph");
      check_keys(g, "graph", {"file", "generator", "seed", "largest_component"});
      read(g, "file", c.graph.file);
      read(g, "generator", c.graph.generator);
      read(g, "seed", c.graph.seed);
      read(g, "largest_component", c.graph.largest_component);
    }
    if (j.contains("params")) {
      const auto& p = j.at("params");
      check_keys(p, "params",
                 {"f", "alpha", "eps", "k", "L", "lambda", "C", "C_prime", "C_second", "lazy_leaves", "budget"});
      read(p, "f", c.dso.f);
      read(p, "alpha", c.dso.alpha);
      read(p, "eps", c.dso.eps);
      if (p.contains("k") && p.at("k").get<int>() != 2) throw std::invalid_argument("the oracle uses k = 2");
      if (p.contains("L")) c.dso.L_override = p.at("L").is_null() ? std::nullopt : std::optional<int>(p.at("L").get<int>());
      if (p.contains("lambda"))
        c.dso.lambda_override = p.at("lambda").is_null() ? std::nullopt : std::optional<int>(p.at("lambda").get<int>());
      read(p, "C", c.dso.C);
      read(p, "C_prime", c.dso.C_prime);
      read(p, "C_second", c.dso.C_second);
      read(p, "lazy_leaves", c.dso.lazy_leaves);
      read(p, "budget", c.dso.entry_budget);
    }
    read(j, "seed", c.dso.seed);
    if (j.contains("workload")) {
      const auto& w = j.at("workload");
      check_keys(w, "workload", {"queries", "seed", "min_failures", "max_failures", "path_bias"});
      read(w, "queries", c.workload.queries);
      read(w, "seed", c.workload.seed);
      read(w, "min_failures", c.workload.min_failures);
      read(w, "max_failures", c.workload.max_failures);
      read(w, "path_bias", c.workload.path_bias);
    }
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      check_keys(t, "thresholds", {"max_stretch_violation_rate"});
      read(t, "max_stretch_violation_rate", c.thresholds.max_stretch_violation_rate);
    }
    read(j, "space_samples", c.space_samples);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config: ") + e.what());
  }
  validate(c);
}

void validate(const ExperimentConfig& c) {
  if (c.graph.file.empty() && c.graph.generator.empty()) throw std::invalid_argument("no graph source given");
  const auto& d = c.dso;
  if (d.f < 2) throw std::invalid_argument("the oracle needs f >= 2");
  if (!(d.alpha > 0 && d.alpha < 0.5)) throw std::invalid_argument("alpha must lie in (0, 1/2)");
  if (!(d.eps > 0 && d.eps < 3)) throw std::invalid_argument("eps must lie in (0, 3)");
  if (d.L_override && *d.L_override < 2) throw std::invalid_argument("L must be at least 2");
  if (d.lambda_override && (*d.lambda_override < 1 || (d.L_override && *d.lambda_override > *d.L_override)))
    throw std::invalid_argument("lambda must lie in [1, L]");
  if (c.dso.C <= 0 || c.dso.C_prime <= 0 || c.dso.C_second <= 0)
    throw std::invalid_argument("sampling constants must be positive");
  const auto& w = c.workload;
  if (w.queries < 0) throw std::invalid_argument("negative query count");
  const int maxf = w.max_failures < 0 ? c.dso.f : w.max_failures;
  if (w.min_failures < 0 || w.min_failures > maxf || maxf > c.dso.f)
    throw std::invalid_argument("failure counts must satisfy 0 <= min <= max <= f");
  if (w.path_bias < 0 || w.path_bias > 1) throw std::invalid_argument("path_bias must lie in [0, 1]");
  if (c.thresholds.max_stretch_violation_rate < 0) throw std::invalid_argument("negative threshold");
  if (c.space_samples < 0) throw std::invalid_argument("negative space sample count");
}

Graph load_graph(const GraphSource& src) {
  Graph g = !src.file.empty() ? load_dimacs_file(src.file) : generate_from_spec(src.generator, src.seed);
  return src.largest_component ? largest_component(g) : g;
}

std::vector<QueryRecord> sample_workload(const Graph& g, const Workload& w, int f) {
  std::vector<QueryRecord> out;
  if (g.n() == 0) return out;
  Rng rng(derive_seed(w.seed, "workload"));
  APSPTable apsp(g);
  const int maxf = w.max_failures < 0 ? f : w.max_failures;
  for (int i = 0; i < w.queries; ++i) {
    QueryRecord r;
    r.index = i;
    r.s = static_cast<Vertex>(rng.below(g.n()));
    r.t = static_cast<Vertex>(rng.below(g.n()));
    const int k = w.min_failures + static_cast<int>(rng.below(static_cast<std::uint64_t>(maxf - w.min_failures + 1)));
    const auto path = apsp.path(r.s, r.t);
    for (int j = 0; j < k && g.m() > 0; ++j) {
      if (path.size() >= 2 && rng.bernoulli(w.path_bias)) {
        const auto at = rng.below(path.size() - 1);
        r.F.push_back(*g.find_edge(path[at], path[at + 1]));
      } else {
        r.F.push_back(static_cast<EdgeId>(rng.below(g.m())));
      }
    }
    r.F = FailureSet(r.F).edges;
    out.push_back(std::move(r));
  }
  return out;
}

WorkloadSummary run_workload(const Dso& dso, std::vector<QueryRecord>& records, const Thresholds& th,
                             unsigned threads) {
  const Graph& g = dso.graph();
  const double bound = 3 + dso.params().eps;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      auto& r = records[i];
      const FailureSet F(r.F);
      auto t0 = std::chrono::steady_clock::now();
      auto res = dso.query(r.s, r.t, F);
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      r.answer = res.answer;
      r.case_label = res.case_label;
      r.sampling_failure = res.sampling_failure;
      r.exact = exact_replacement(g, r.s, r.t, F);
      if (r.exact < kInf && r.answer < kInf && r.exact > 0)
        r.stretch = static_cast<double>(r.answer) / static_cast<double>(r.exact);
      else if (r.exact == 0 && r.answer == 0)
        r.stretch = 1.0;
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(records.size(), 1))));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  WorkloadSummary S;
  for (const auto& r : records) {
    ++S.queries;
    ++S.cases[r.case_label];
    S.sampling_failures += r.sampling_failure;
    if (r.answer < r.exact) ++S.soundness_violations;
    if (r.exact >= kInf) continue;
    ++S.finite;
    if (r.stretch) S.max_stretch = std::max(S.max_stretch, *r.stretch);
    if (static_cast<double>(r.answer) > bound * static_cast<double>(r.exact)) ++S.stretch_violations;
  }
  S.violation_rate = S.finite ? static_cast<double>(S.stretch_violations) / S.finite : 0.0;
  S.passed = S.soundness_violations == 0 && S.violation_rate <= th.max_stretch_violation_rate;
  return S;
}

Report run_campaign(const ExperimentConfig& config, unsigned threads) {
  validate(config);
  Report R;
  R.config = config;
  Graph g = load_graph(config.graph);
  R.n = g.n();
  R.m = g.m();
  DsoConfig dc = config.dso;
  dc.threads = threads;
  auto dso = Dso::build(g, dc);
  R.params = dso->params();
  R.build_seconds = dso->build_seconds();
  if (config.space_samples > 0) R.space = dso->measure_space(config.space_samples);
  R.records = sample_workload(dso->graph(), config.workload, config.dso.f);
  R.summary = run_workload(*dso, R.records, config.thresholds, threads);
  return R;
}

json record_json(const QueryRecord& r) {
  return json{{"index", r.index},
              {"s", r.s},
              {"t", r.t},
              {"F", r.F},
              {"answer", dist_json(r.answer)},
              {"exact", dist_json(r.exact)},
              {"stretch", r.stretch ? json(*r.stretch) : json(nullptr)},
              {"case", r.case_label},
              {"sampling_failure", r.sampling_failure}};
}

json report_json(const Report& r) {
  json j;
  j["config"] = r.config;
  j["graph"] = {{"n", r.n}, {"m", r.m}};
  const auto& p = r.params;
  j["derived"] = {{"L", p.L},          {"lambda_raw", p.lambda_raw}, {"lambda", p.lambda},
                  {"granularity", p.granularity}, {"degenerate", p.degenerate}, {"delta", p.delta},
                  {"ball_cap", p.ball_cap}};
  if (r.space) {
    const auto& s = *r.space;
    j["space_words"] = {{"forest", s.forest},       {"pivots", s.pivots},       {"balls", s.balls},
                        {"lca", s.lca},             {"ft_trees", s.ft_trees},   {"ft_pairs", s.ft_pairs},
                        {"ft_sampled", s.ft_sampled}, {"ft_exact", s.ft_exact}, {"total", s.total()},
                        {"apsp_excluded", s.apsp}};
  }
  const auto& S = r.summary;
  j["summary"] = {{"queries", S.queries},
                  {"finite", S.finite},
                  {"soundness_violations", S.soundness_violations},
                  {"stretch_violations", S.stretch_violations},
                  {"violation_rate", S.violation_rate},
                  {"max_stretch", S.max_stretch},
                  {"sampling_failures", S.sampling_failures},
                  {"cases", S.cases},
                  {"passed", S.passed}};
  json recs = json::array();
  for (const auto& q : r.records) recs.push_back(record_json(q));
  j["queries"] = std::move(recs);
  return j;
}

json timings_json(const Report& r) {
  std::vector<double> q;
  for (const auto& x : r.records) q.push_back(x.seconds);
  double total = 0;
  for (double x : q) total += x;
  return json{{"build_seconds", r.build_seconds}, {"query_seconds_total", total}, {"query_seconds", q}};
}

std::string report_csv(const Report& r) {
  std::ostringstream out;
  out << "index,s,t,F,answer,exact,stretch,case,sampling_failure\n";
  for (const auto& q : r.records) {
    out << q.index << ',' << q.s << ',' << q.t << ',';
    for (std::size_t i = 0; i < q.F.size(); ++i) out << (i ? ";" : "") << q.F[i];
    out << ',';
    if (q.answer < kInf) out << q.answer;
    out << ',';
    if (q.exact < kInf) out << q.exact;
    out << ',';
    if (q.stretch) out << json(*q.stretch).dump();
    out << ',' << q.case_label << ',' << (q.sampling_failure ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace ftdso
