// Acceptance runner: one line per criterion, exit status 0 only if all pass.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "expath_checks.hpp"
#include "ftdso/campaign.hpp"
#include "ftdso/dso.hpp"
#include "ftdso/expath.hpp"
#include "ftdso/forest.hpp"
#include "ftdso/ft_tree.hpp"
#include "ftdso/generators.hpp"
#include "ftdso/reference.hpp"
#include "ftdso/rng.hpp"
#include "ftdso/tz_oracle.hpp"

using namespace ftdso;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  json data = json::object();
};

std::string fmt(double x, int prec = 4) {
  std::ostringstream o;
  o << std::setprecision(prec) << x;
  return o.str();
}

Graph connected_er(Rng& rng, int n, double p) {
  while (true) {
    Graph g = make_er(n, p, rng.next());
    if (is_connected(g)) return g;
  }
}

// Failures drawn mostly from the canonical s-t path so that they matter.
FailureSet path_biased_failures(Rng& rng, const Graph& g, const APSPTable& apsp, Vertex s, Vertex t, int f) {
  std::vector<EdgeId> es;
  const auto path = apsp.path(s, t);
  const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(f) + 1));
  for (int i = 0; i < k && g.m() > 0; ++i) {
    if (path.size() >= 2 && rng.bernoulli(0.7)) {
      const auto j = rng.below(path.size() - 1);
      es.push_back(*g.find_edge(path[j], path[j + 1]));
    } else {
      es.push_back(static_cast<EdgeId>(rng.below(g.m())));
    }
  }
  return FailureSet(es);
}

Vertex any_vertex(Rng& rng, const Graph& g) { return static_cast<Vertex>(rng.below(g.n())); }

// 1
Outcome tz_sandwich() {
  std::int64_t checked = 0, violations = 0, inexact_k1 = 0;
  for (int seed = 0; seed < 30; ++seed) {
    Graph g = make_er(200, 0.05, derive_seed(1, "acc/tz", seed));
    APSPTable apsp(g);
    for (int k : {1, 2, 3}) {
      auto hier = sample_hierarchy(g.n(), k, derive_seed(1, "acc/tz-h", seed, k));
      TZBuilder b(g, hier);
      TZOracle o = b.build(nullptr);
      for (Vertex s = 0; s < g.n(); ++s)
        for (Vertex t = 0; t < g.n(); ++t) {
          const Dist d = apsp.dist(s, t), q = o.query_modified(s, t);
          ++checked;
          if (q < d || (d < kInf && q > (2 * k - 1) * d) || (d >= kInf && q < kInf)) ++violations;
          if (k == 1 && q != d) ++inexact_k1;
        }
    }
  }
  Outcome r;
  r.pass = violations == 0 && inexact_k1 == 0;
  r.detail = std::to_string(checked) + " pairs, " + std::to_string(violations) + " violations, " +
             std::to_string(inexact_k1) + " inexact at k=1";
  r.data = {{"pairs", checked}, {"violations", violations}, {"inexact_k1", inexact_k1}};
  return r;
}

// 2
Outcome inheritance() {
  Rng rng(derive_seed(2, "acc/inherit"));
  int chains = 0, not_equal = 0, above = 0, path_changed = 0;
  while (chains < 1000) {
    const int n = 30 + static_cast<int>(rng.below(31));
    Graph g = make_er(n, 4.0 / n + 0.05 * rng.uniform(), rng.next());
    auto hier = sample_hierarchy(n, 2 + static_cast<int>(rng.below(2)), rng.next());
    TZBuilder b(g, hier);
    EdgeMask gp(g.m(), 0);
    for (EdgeId e = 0; e < g.m(); ++e) gp[e] = rng.bernoulli(0.15);
    TZOracle og = b.build(&gp);
    const Vertex s = any_vertex(rng, g), t = any_vertex(rng, g);
    const Dist len = og.query_modified(s, t);
    if (len >= kInf) continue;
    const auto wg = witness(og, g, &gp, s, t);
    EdgeMask keep(g.m(), 0);
    for (std::size_t i = 0; i + 1 < wg.path.size(); ++i) keep[*g.find_edge(wg.path[i], wg.path[i + 1])] = 1;
    EdgeMask h = gp;
    const double drop = 0.1 + 0.4 * rng.uniform();
    for (EdgeId e = 0; e < g.m(); ++e)
      if (!keep[e] && rng.bernoulli(drop)) h[e] = 1;
    TZOracle oh = b.build(&h);
    const Dist got = oh.query_modified(s, t);
    ++chains;
    if (got != len) ++not_equal;
    if (got > len) ++above;
    if (witness(oh, g, &h, s, t).path != wg.path) ++path_changed;
  }
  Outcome r;
  r.pass = not_equal == 0;
  r.detail = std::to_string(chains) + " chains, " + std::to_string(not_equal) + " with value != |P| (" +
             std::to_string(above) + " above, " + std::to_string(path_changed) + " witness changes)";
  r.data = {{"chains", chains}, {"not_equal", not_equal}, {"above", above}, {"witness_changed", path_changed}};
  return r;
}

double forest_C(int f) { return f == 1 ? 0.5 : 0.05; }

// 3
Outcome short_soundness() {
  std::int64_t queries = 0, violations = 0;
  int forests = 0;
  for (int f : {1, 2})
    for (int L : {4, 8}) {
      Rng rng(derive_seed(3, "acc/sound", f, L));
      Graph g = connected_er(rng, 120, 0.05);
      auto P = derive_params(g.n(), L, f, 2, forest_C(f));
      ForestOptions o;
      o.lazy_leaves = true;
      auto forest = build_forest(g, P, sample_hierarchy(g.n(), 2, rng.next()), rng.next(), o);
      ++forests;
      APSPTable apsp(g);
      for (int q = 0; q < 2500; ++q) {
        const Vertex s = any_vertex(rng, g), t = any_vertex(rng, g);
        const FailureSet F = path_biased_failures(rng, g, apsp, s, t, f);
        ++queries;
        if (forest.query_short(s, t, F) < exact_replacement(g, s, t, F)) ++violations;
      }
    }
  Outcome r;
  r.pass = violations == 0 && queries >= 10000;
  r.detail = std::to_string(queries) + " queries over " + std::to_string(forests) + " forests, " +
             std::to_string(violations) + " below the true distance";
  r.data = {{"queries", queries}, {"violations", violations}};
  return r;
}

// 4
Outcome short_stretch() {
  Outcome r;
  r.pass = true;
  std::ostringstream d;
  for (int f : {1, 2})
    for (int L : {4, 8}) {
      Rng rng(derive_seed(4, "acc/stretch", f, L));
      Graph g = connected_er(rng, 120, 0.05);
      auto P = derive_params(g.n(), L, f, 2, forest_C(f));
      ForestOptions o;
      o.lazy_leaves = true;
      auto forest = build_forest(g, P, sample_hierarchy(g.n(), 2, rng.next()), rng.next(), o);
      APSPTable apsp(g);
      int finite = 0, over = 0;
      for (int q = 0; q < 500; ++q) {
        const Vertex s = any_vertex(rng, g), t = any_vertex(rng, g);
        const FailureSet F = path_biased_failures(rng, g, apsp, s, t, f);
        const Dist sh = exact_short(g, s, t, F, L);
        if (sh >= kInf) continue;
        ++finite;
        if (forest.query_short(s, t, F) > 3 * sh) ++over;
      }
      const double rate = finite ? static_cast<double>(over) / finite : 0.0;
      if (rate > 0.01 || finite == 0) r.pass = false;
      d << "f=" << f << " L=" << L << " C=" << forest_C(f) << " trees=" << forest.trees() << ": " << over << "/"
        << finite << " (" << fmt(100 * rate, 3) << "%); ";
      r.data[std::to_string(f) + "," + std::to_string(L)] = {
          {"C", forest_C(f)}, {"trees", forest.trees()}, {"finite", finite}, {"over", over}, {"rate", rate}};
    }
  r.detail = d.str();
  return r;
}

// 5 and 6 share the runs.
struct ExpathRun {
  std::int64_t sssp_checks = 0, sssp_mismatch = 0;
  std::int64_t expath_checks = 0, expath_mismatch = 0, certificate_fail = 0;
  std::int64_t prefix_checks = 0, prefix_fail = 0;
};

ExpathRun run_expath_exhaustive() {
  ExpathRun R;
  Rng rng(derive_seed(5, "acc/expath"));
  for (int n = 1; n <= 7; ++n)
    for (int rep = 0; rep < 200; ++rep) {
      const int max_w = rep % 5 == 4 ? 3 : 1;
      Graph g(n);
      while (true) {
        g = Graph(n);
        const double p = 0.3 + 0.6 * rng.uniform();
        for (Vertex a = 0; a < n; ++a)
          for (Vertex b = a + 1; b < n; ++b)
            if (rng.bernoulli(p)) g.add_edge(a, b, max_w > 1 ? 1 + static_cast<int>(rng.below(max_w)) : 1);
        if (is_connected(g)) break;
      }
      APSPTable apsp(g);
      ExpathEngine eng(g, apsp);
      EdgeMask A(g.m(), 0);
      const int a_size = g.m() ? static_cast<int>(rng.below(4)) : 0;
      for (int i = 0; i < a_size; ++i) A[rng.below(g.m())] = 1;
      for (int ell : {1, 3}) {
        for (Vertex s = 0; s < n; ++s) {
          ++R.sssp_checks;
          if (eng.decomposable_sssp(&A, s, ell) != brute_decomposable_sssp(g, apsp, &A, s, ell)) ++R.sssp_mismatch;
        }
        for (int lambda : {0, 1})
          for (Vertex s = 0; s < n; ++s)
            for (Vertex t = 0; t < n; ++t) {
              auto p = eng.shortest_expath(&A, s, t, ell, lambda);
              ++R.expath_checks;
              if (p.length != brute_shortest_expath(g, apsp, &A, s, t, ell, lambda)) ++R.expath_mismatch;
              if (p.empty()) continue;
              if (!verify_expath(g, apsp, &A, p, ell, lambda)) ++R.certificate_fail;
              ++R.prefix_checks;
              if (!ftdso::testing::prefix_bounds_hold(g, eng, &A, p)) ++R.prefix_fail;
            }
      }
    }
  return R;
}

ExpathRun& expath_run() {
  static ExpathRun run = run_expath_exhaustive();
  return run;
}

Outcome expath_exact() {
  const auto& R = expath_run();
  Outcome r;
  r.pass = R.sssp_mismatch == 0 && R.expath_mismatch == 0 && R.certificate_fail == 0;
  r.detail = std::to_string(R.sssp_checks) + " sssp runs, " + std::to_string(R.expath_checks) + " expath queries; " +
             std::to_string(R.sssp_mismatch + R.expath_mismatch) + " mismatches, " +
             std::to_string(R.certificate_fail) + " bad certificates";
  r.data = {{"sssp", R.sssp_checks},
            {"sssp_mismatch", R.sssp_mismatch},
            {"expath", R.expath_checks},
            {"expath_mismatch", R.expath_mismatch},
            {"certificate_fail", R.certificate_fail}};
  return r;
}

Outcome prefix_bounds() {
  const auto& R = expath_run();
  Outcome r;
  r.pass = R.prefix_fail == 0 && R.prefix_checks > 0;
  r.detail = std::to_string(R.prefix_checks) + " expaths checked, " + std::to_string(R.prefix_fail) + " violations";
  r.data = {{"checked", R.prefix_checks}, {"violations", R.prefix_fail}};
  return r;
}

// 7 and 8 share the runs.
struct FTRun {
  int queries = 0, compared = 0, violations = 0, below_exact = 0, sampling_failures = 0;
  std::int64_t trees = 0, segment_checks = 0, segment_violations = 0;
  std::vector<json> failure_log;
};

FTRun run_ft_sandwich() {
  FTRun R;
  Rng rng(derive_seed(7, "acc/ft"));
  const int f = 2, L = 3;
  const double eps = 0.9;
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = connected_er(rng, 15 + static_cast<int>(rng.below(16)), 0.18);
    APSPTable apsp(g);
    auto piv = sample_pivots(g.n(), f, L, L, 1, 1, 0.15, rng.next());
    if (piv.B.empty()) {
      --trial;
      continue;
    }
    FTContext ctx(g, apsp, piv, f, eps, L);
    for (int q = 0; q < 10; ++q) {
      const Vertex u = any_vertex(rng, g), b = piv.B[rng.below(piv.B.size())];
      FTTree tree(ctx, u, b, 0);
      const FailureSet F = path_biased_failures(rng, g, apsp, u, b, f);
      bool failure = false;
      const Dist got = tree.query(F, [&](Vertex v, Vertex w) { return exact_short(g, v, w, F, L); }, nullptr, &failure);
      tree.build_all();
      ++R.trees;
      ++R.queries;
      const Dist exact = exact_replacement(g, u, b, F);
      if (got < exact) ++R.below_exact;
      const Dist far = brute_faraway_decomposable(g, apsp, u, b, F, 2 * f + 1, eps);
      if (failure) {
        ++R.sampling_failures;
        R.failure_log.push_back({{"n", g.n()}, {"u", u}, {"b", b}, {"F", F.edges}, {"answer", got < kInf ? json(got) : json(nullptr)},
                                 {"faraway", far < kInf ? json(far) : json(nullptr)}});
        continue;
      }
      if (far < kInf) {
        ++R.compared;
        if (got > 3 * far) ++R.violations;
      }
    }
    R.segment_checks += ctx.stats().segment_checks;
    R.segment_violations += ctx.stats().segment_violations;
  }
  return R;
}

FTRun& ft_run() {
  static FTRun run = run_ft_sandwich();
  return run;
}

Outcome ft_sandwich() {
  const auto& R = ft_run();
  const int counted = R.queries - R.sampling_failures;
  const double rate = counted ? static_cast<double>(R.violations) / counted : 0.0;
  Outcome r;
  r.pass = R.below_exact == 0 && rate <= 0.01 && R.compared > 0;
  r.detail = std::to_string(R.queries) + " queries, " + std::to_string(R.compared) + " with finite bound, " +
             std::to_string(R.violations) + " above 3x (" + fmt(100 * rate, 3) + "%), " +
             std::to_string(R.below_exact) + " below d_{G-F}, " + std::to_string(R.sampling_failures) +
             " sampling failures excluded";
  r.data = {{"queries", R.queries},         {"compared", R.compared},   {"violations", R.violations},
            {"rate", rate},                 {"below_exact", R.below_exact},
            {"sampling_failures", R.sampling_failures}, {"sampling_failure_log", R.failure_log}};
  return r;
}

// Small graphs in (7) only produce single-edge segments, so the same check
// also runs on trees over long cycles and grids where segments get longer.
struct SegmentStress {
  std::int64_t trees = 0, nodes = 0, checks = 0, violations = 0;
};

SegmentStress segment_stress() {
  SegmentStress S;
  const int f = 2, L = 3;
  Rng rng(derive_seed(8, "acc/segments"));
  for (int variant = 0; variant < 3; ++variant) {
    Graph g = variant == 0 ? make_cycle(800) : variant == 1 ? make_cycle(1000) : make_grid(400, 3);
    APSPTable apsp(g);
    auto piv = sample_pivots(g.n(), f, 1e-9, L, 1, 1, 1, 17);
    FTContext ctx(g, apsp, piv, f, 0.9, L);
    const Vertex far = variant == 2 ? g.n() - 1 : g.n() / 2;
    for (int lambda : {0, 2}) {
      FTTree t(ctx, 0, far, lambda);
      ++S.trees;
      for (int q = 0; q < 5; ++q) {
        const FailureSet F = path_biased_failures(rng, g, apsp, 0, far, f);
        t.query(F, [&](Vertex v, Vertex w) { return exact_short(g, v, w, F, L); });
      }
      S.nodes += static_cast<std::int64_t>(t.node_count());
    }
    S.checks += ctx.stats().segment_checks;
    S.violations += ctx.stats().segment_violations;
  }
  return S;
}

Outcome segment_asserts() {
  const auto& R = ft_run();
  const auto S = segment_stress();
  Outcome r;
  r.pass = R.segment_violations == 0 && S.violations == 0 && S.checks > 0;
  r.detail = std::to_string(R.trees) + " trees from (7): " + std::to_string(R.segment_checks) +
             " multi-edge segment checks, " + std::to_string(R.segment_violations) + " violations; long-path stress " +
             std::to_string(S.trees) + " trees, " + std::to_string(S.nodes) + " nodes: " + std::to_string(S.checks) +
             " checks, " + std::to_string(S.violations) + " violations";
  r.data = {{"trees", R.trees},
            {"checks", R.segment_checks},
            {"violations", R.segment_violations},
            {"stress", {{"trees", S.trees}, {"nodes", S.nodes}, {"checks", S.checks}, {"violations", S.violations}}}};
  return r;
}

// 9
Outcome full_dso() {
  Outcome r;
  r.pass = true;
  std::ostringstream d;
  for (double eps : {0.5, 1.0}) {
    ExperimentConfig c;
    c.graph.generator = "er:120:0.05";
    c.graph.seed = 10;  // connected at n = 120
    c.dso.f = 2;
    c.dso.alpha = 0.4;
    c.dso.eps = eps;
    c.dso.seed = derive_seed(9, "acc/dso", static_cast<std::uint64_t>(eps * 10));
    c.workload.queries = 500;
    c.workload.seed = 19;
    c.space_samples = 0;
    auto R = run_campaign(c, 1);
    const auto& S = R.summary;
    const double rate = S.queries ? static_cast<double>(S.stretch_violations) / S.queries : 0.0;
    if (S.soundness_violations != 0 || rate > 0.01) r.pass = false;
    d << "eps=" << eps << " n=" << R.n << ": " << S.soundness_violations << " unsound, " << S.stretch_violations
      << " over 3+eps, cases {";
    bool first = true;
    for (const auto& [k, v] : S.cases) {
      d << (first ? "" : ", ") << k << ":" << v;
      first = false;
    }
    d << "}; ";
    r.data[fmt(eps)] = {{"n", R.n},
                        {"unsound", S.soundness_violations},
                        {"over", S.stretch_violations},
                        {"rate", rate},
                        {"max_stretch", S.max_stretch},
                        {"sampling_failures", S.sampling_failures},
                        {"cases", S.cases}};
  }
  r.detail = d.str();
  return r;
}

// 10
Outcome space_trend() {
  std::vector<double> xs, ys;
  std::ostringstream d;
  json rows = json::array();
  for (int n : {50, 100, 200, 400}) {
    Graph g = largest_component(make_er(n, 8.0 / n, derive_seed(10, "acc/space", n)));
    DsoConfig cfg;
    cfg.f = 2;
    cfg.alpha = 0.4;
    cfg.eps = 1.0;
    cfg.seed = 10;
    auto dso = Dso::build(g, cfg);
    const auto s = dso->measure_space(20);
    xs.push_back(std::log(static_cast<double>(g.n())));
    ys.push_back(std::log(static_cast<double>(s.total())));
    d << g.n() << ":" << s.total() << " ";
    rows.push_back({{"n", g.n()}, {"total", s.total()}, {"forest", s.forest}, {"balls", s.balls},
                    {"lca", s.lca}, {"ft_trees", s.ft_trees}, {"pivots", s.pivots}});
  }
  const double mx = (xs[0] + xs[1] + xs[2] + xs[3]) / 4, my = (ys[0] + ys[1] + ys[2] + ys[3]) / 4;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 4; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  Outcome r;
  r.pass = slope < 2.0;
  r.detail = "words " + d.str() + "-> fitted exponent " + fmt(slope, 4);
  r.data = {{"rows", rows}, {"exponent", slope}};
  return r;
}

// 11
Outcome audit_root() {
  Rng rng(derive_seed(11, "acc/audit"));
  std::int64_t roots = 0, good = 0;
  int trials = 0;
  while (trials < 200) {
    Graph g = connected_er(rng, 60, 0.08);
    auto P = derive_params(g.n(), 4, 1, 2, 1.0);
    ForestOptions o;
    o.instrument = true;
    o.trees = 4;
    auto forest = build_forest(g, P, sample_hierarchy(g.n(), 2, rng.next()), rng.next(), o);
    const Vertex s = any_vertex(rng, g), t = any_vertex(rng, g);
    APSPTable apsp(g);
    FailureSet F = path_biased_failures(rng, g, apsp, s, t, 1);
    const auto path = spanner_witness(g, forest.hierarchy(), s, t, F);
    if (path.empty()) continue;
    ++trials;
    const auto a = audit_well_behaved(forest, g, F, path);
    roots += a.depth[0].nodes;
    good += a.depth[0].well_behaved;
  }
  const double p = 1 - 1 / std::exp(1.0);
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(roots));
  const double freq = static_cast<double>(good) / static_cast<double>(roots);
  Outcome r;
  r.pass = freq >= p - 3 * sigma;
  r.detail = std::to_string(trials) + " trials, " + std::to_string(roots) + " roots, frequency " + fmt(freq) +
             " vs bound " + fmt(p - 3 * sigma);
  r.data = {{"trials", trials}, {"roots", roots}, {"frequency", freq}, {"bound", p - 3 * sigma}};
  return r;
}

// 12
Outcome reproducibility() {
  std::vector<std::string> fails;
  auto bytes_of = [](const Graph& g, const DsoConfig& cfg) {
    std::vector<std::uint8_t> out;
    Dso::build(g, cfg)->serialize(out);
    return out;
  };
  ExperimentConfig c;
  c.graph.generator = "er:80:0.07";
  c.graph.seed = 12;
  c.dso.seed = 12;
  c.workload.queries = 60;
  c.workload.seed = 12;
  c.space_samples = 4;
  for (int variant = 0; variant < 2; ++variant) {
    if (variant == 1) {
      c.dso.L_override = 3;
      c.dso.lambda_override = 2;
      c.dso.C = 0.3;
      c.dso.C_prime = 0.2;
      c.dso.C_second = 0.05;
    }
    const std::string tag = variant ? "non-degenerate" : "default";
    const Graph g = load_graph(c.graph);
    DsoConfig one = c.dso, four = c.dso;
    one.threads = 1;
    four.threads = 4;
    const auto a = bytes_of(g, one), b = bytes_of(g, one), e = bytes_of(g, four);
    if (a != b) fails.push_back(tag + ": oracle differs between runs");
    if (a != e) fails.push_back(tag + ": oracle differs across thread counts");
    const auto ra = run_campaign(c, 1), rb = run_campaign(c, 1), rc = run_campaign(c, 4);
    const auto ja = report_json(ra).dump(), jb = report_json(rb).dump(), jc = report_json(rc).dump();
    if (ja != jb || report_csv(ra) != report_csv(rb)) fails.push_back(tag + ": report differs between runs");
    if (ja != jc || report_csv(ra) != report_csv(rc)) fails.push_back(tag + ": report differs across thread counts");
  }
  Outcome r;
  r.pass = fails.empty();
  r.detail = fails.empty() ? "oracle bytes and reports identical (2 configs, 1 and 4 threads)" : fails.front();
  r.data = {{"failures", fails}};
  return r;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  double time_limit;  // seconds, 0: none
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance runner"};
  std::vector<int> only;
  std::string json_out;
  app.add_option("--only", only, "criteria to run (default all)");
  app.add_option("--json", json_out, "write detailed results here");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "tz-sandwich", tz_sandwich, 120},
      {2, "inheritance", inheritance, 0},
      {3, "short-soundness", short_soundness, 0},
      {4, "short-stretch", short_stretch, 600},
      {5, "expath-exactness", expath_exact, 900},
      {6, "prefix-bounds", prefix_bounds, 0},
      {7, "ft-sandwich", ft_sandwich, 0},
      {8, "segment-asserts", segment_asserts, 0},
      {9, "full-dso", full_dso, 1200},
      {10, "space-trend", space_trend, 0},
      {11, "audit-root-frequency", audit_root, 0},
      {12, "reproducibility", reproducibility, 0},
  };
  const std::set<int> wanted(only.begin(), only.end());
  json results = json::array();
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      o.pass = false;
      o.detail += "; over the time limit of " + fmt(c.time_limit) + " s";
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << c.id << " " << std::left << std::setw(22)
              << c.name << std::right << o.detail << " [" << fmt(secs, 3) << " s]" << std::endl;
    results.push_back({{"id", c.id}, {"name", c.name}, {"pass", o.pass}, {"detail", o.detail}, {"seconds", secs},
                       {"data", o.data}});
  }
  if (!json_out.empty()) std::ofstream(json_out) << results.dump(2) << '\n';
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
