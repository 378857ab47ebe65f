#include "ftdso/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ftdso/expath.hpp"
#include "ftdso/tz_oracle.hpp"

namespace ftdso {

Dist exact_replacement(const Graph& g, Vertex s, Vertex t, const FailureSet& F) {
  EdgeMask m = F.mask(g);
  return canonical_dijkstra(g, s, &m).dist[t];
}

Dist exact_short(const Graph& g, Vertex s, Vertex t, const FailureSet& F, int L) {
  EdgeMask m = F.mask(g);
  return hop_bounded_dist(g, s, L, &m)[t];
}

std::vector<std::vector<int>> decomposition_levels(const APSPTable& apsp, const std::vector<Vertex>& p) {
  const int m = static_cast<int>(p.size());
  // canon[i][j]: p[i..j] is the canonical p[i]-p[j] path of G
  std::vector<std::vector<char>> canon(m, std::vector<char>(m, 0));
  for (int i = 0; i < m; ++i) {
    canon[i][i] = 1;
    for (int j = i + 1; j < m && canon[i][j - 1]; ++j) canon[i][j] = apsp.pred(p[i], p[j]) == p[j - 1];
  }
  std::vector<std::vector<int>> lv(m, std::vector<int>(m, kInfLevels));
  for (int a = 0; a < m; ++a) {
    auto& f = lv[a];
    for (int j = a; j < m; ++j) {
      if (canon[a][j]) {
        f[j] = 0;
        continue;
      }
      for (int i = a + 1; i <= j; ++i)
        if (canon[i][j]) f[j] = std::min({f[j], f[i] + 1, f[i - 1] + 1});
    }
  }
  return lv;
}

namespace {

struct PathDfs {
  const Graph& g;
  const APSPTable& apsp;
  const EdgeMask* A;
  std::int64_t budget;
  std::int64_t expanded = 0;
  std::vector<Vertex> path;
  std::vector<Dist> pre;  // pre[j] = length of path[0..j]
  std::vector<char> on_path;
  // canon[i][j] for the current path, and level count of path[0..j]
  std::vector<std::vector<char>> canon;
  std::vector<int> lv0;

  PathDfs(const Graph& g_, const APSPTable& apsp_, const EdgeMask* A_, std::int64_t budget_)
      : g(g_), apsp(apsp_), A(A_), budget(budget_), on_path(g_.n(), 0),
        canon(g_.n(), std::vector<char>(g_.n(), 0)), lv0(g_.n(), kInfLevels) {}

  bool allowed(EdgeId e) const { return !A || (*A)[e] == 0; }

  void tick() {
    if (++expanded > budget) throw BudgetExceeded("brute-force search exceeded its node budget");
  }

  void push(Vertex v, Dist w) {
    const int j = static_cast<int>(path.size());
    path.push_back(v);
    pre.push_back(j == 0 ? 0 : pre.back() + w);
    on_path[v] = 1;
    canon[j][j] = 1;
    for (int i = 0; i < j; ++i) canon[i][j] = canon[i][j - 1] && apsp.pred(path[i], v) == path[j - 1];
    if (canon[0][j]) {
      lv0[j] = 0;
    } else {
      int best = kInfLevels;
      for (int i = 1; i <= j; ++i)
        if (canon[i][j]) best = std::min({best, lv0[i] + 1, lv0[i - 1] + 1});
      lv0[j] = best;
    }
  }

  void pop() {
    on_path[path.back()] = 0;
    path.pop_back();
    pre.pop_back();
  }
};

bool certificate_from_levels(const Graph& g, const std::vector<std::vector<int>>& lv, const std::vector<Dist>& pre,
                             int ell, int lambda) {
  const int m = static_cast<int>(pre.size());
  const int lg = expath_log_range(g.n(), g.max_weight());
  const int phases = 2 * lg + 1;
  for (int a = 0; a <= std::min(lambda, m - 1); ++a) {
    std::vector<char> reach(m, 0);
    reach[a] = 1;
    for (int i = 0; i < phases; ++i) {
      const Dist cap = expath_block_cap(lg, i);
      std::vector<char> next = reach;
      for (int x = 0; x < m; ++x) {
        if (!reach[x]) continue;
        for (int y = x; y < m && pre[y] - pre[x] <= cap; ++y)
          if (lv[x][y] <= ell) next[y] = 1;
      }
      reach.swap(next);
    }
    for (int c = std::max(0, m - 1 - lambda); c < m; ++c)
      if (reach[c]) return true;
  }
  return false;
}

std::vector<Dist> prefix_lengths(const Graph& g, const std::vector<Vertex>& p) {
  std::vector<Dist> pre(p.size(), 0);
  for (std::size_t i = 1; i < p.size(); ++i) {
    auto e = g.find_edge(p[i - 1], p[i]);
    if (!e) throw GraphError("path uses a non-edge");
    pre[i] = pre[i - 1] + g.edge(*e).w;
  }
  return pre;
}

}  // namespace

bool is_expath_certificate(const Graph& g, const APSPTable& apsp, const std::vector<Vertex>& p, int ell,
                           int lambda) {
  if (p.empty()) return false;
  return certificate_from_levels(g, decomposition_levels(apsp, p), prefix_lengths(g, p), ell, lambda);
}

std::vector<Dist> brute_decomposable_sssp(const Graph& g, const APSPTable& apsp, const EdgeMask* A, Vertex s,
                                          int ell, std::int64_t budget) {
  std::vector<Dist> best(g.n(), kInf);
  PathDfs dfs(g, apsp, A, budget);
  auto rec = [&](auto&& self) -> void {
    dfs.tick();
    const int j = static_cast<int>(dfs.path.size()) - 1;
    const Vertex v = dfs.path.back();
    best[v] = std::min(best[v], dfs.pre.back());
    for (const Arc& a : g.neighbors(v)) {
      if (dfs.on_path[a.to] || !dfs.allowed(a.id)) continue;
      dfs.push(a.to, a.w);
      // prefixes of decomposable paths are decomposable with no more levels
      if (dfs.lv0[j + 1] <= ell) self(self);
      dfs.pop();
    }
  };
  dfs.push(s, 0);
  rec(rec);
  return best;
}

Dist brute_shortest_expath(const Graph& g, const APSPTable& apsp, const EdgeMask* A, Vertex s, Vertex t, int ell,
                           int lambda, std::int64_t budget) {
  if (s == t) return 0;
  const auto h = canonical_dijkstra(g, t, A).dist;
  if (h[s] >= kInf) return kInf;
  Dist best = kInf;
  PathDfs dfs(g, apsp, A, budget);
  auto rec = [&](auto&& self) -> void {
    dfs.tick();
    const Vertex v = dfs.path.back();
    if (v == t) {
      if (dfs.pre.back() < best &&
          certificate_from_levels(g, decomposition_levels(apsp, dfs.path), dfs.pre, ell, lambda))
        best = dfs.pre.back();
      return;
    }
    for (const Arc& a : g.neighbors(v)) {
      if (dfs.on_path[a.to] || !dfs.allowed(a.id)) continue;
      if (h[a.to] >= kInf || dfs.pre.back() + a.w + h[a.to] >= best) continue;
      dfs.push(a.to, a.w);
      self(self);
      dfs.pop();
    }
  };
  dfs.push(s, 0);
  rec(rec);
  return best;
}

TrapezoidResult trapezoid(const Graph& g, const FailureSet& F, const std::vector<Vertex>& P, double eps) {
  TrapezoidResult r;
  if (P.empty()) return r;
  EdgeMask mask = F.mask(g);
  r.exists = true;
  for (std::size_t i = 0; i + 1 < P.size(); ++i) {
    auto e = g.find_edge(P[i], P[i + 1]);
    if (!e || mask[*e]) r.exists = false;
  }
  std::vector<Dist> pre(P.size(), 0);
  for (std::size_t i = 1; i < P.size(); ++i) {
    auto e = g.find_edge(P[i - 1], P[i]);
    pre[i] = pre[i - 1] + (e ? g.edge(*e).w : 1);
  }
  const Dist total = pre.back();
  std::vector<char> member(g.n(), 0);
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double radius = eps / 9.0 * static_cast<double>(std::min(pre[i], total - pre[i]));
    auto d = canonical_dijkstra(g, P[i], &mask).dist;
    for (Vertex z = 0; z < g.n(); ++z)
      if (d[z] < kInf && static_cast<double>(d[z]) <= radius) member[z] = 1;
  }
  member[P.front()] = member[P.back()] = 0;
  for (Vertex z = 0; z < g.n(); ++z)
    if (member[z]) r.members.push_back(z);
  r.far_away = r.exists;
  for (Vertex x : F.endpoints(g))
    if (member[x]) r.far_away = false;
  return r;
}

Dist brute_faraway_decomposable(const Graph& g, const APSPTable& apsp, Vertex u, Vertex v, const FailureSet& F,
                                int ell, double eps, std::int64_t budget) {
  if (u == v) return 0;
  EdgeMask mask = F.mask(g);
  const auto h = canonical_dijkstra(g, v, &mask).dist;
  if (h[u] >= kInf) return kInf;
  std::vector<std::vector<Dist>> dF;
  for (Vertex x : F.endpoints(g))
    if (x != u && x != v) dF.push_back(canonical_dijkstra(g, x, &mask).dist);
  auto inside = [&](Dist d, Dist radius_len) {
    return d < kInf && static_cast<double>(d) <= eps / 9.0 * static_cast<double>(radius_len);
  };

  PathDfs dfs(g, apsp, &mask, budget);
  Dist bound = h[u];
  Dist next_bound = kInf;
  bool found = false;
  Dist found_len = kInf;
  auto rec = [&](auto&& self) -> void {
    dfs.tick();
    const int j = static_cast<int>(dfs.path.size()) - 1;
    const Vertex y = dfs.path.back();
    const Dist a = dfs.pre.back();
    if (y == v) {
      const Dist total = a;
      for (int i = 0; i <= j; ++i) {
        const Dist r = std::min(dfs.pre[i], total - dfs.pre[i]);
        for (const auto& d : dF)
          if (inside(d[dfs.path[i]], r)) return;
      }
      found = true;
      found_len = total;
      return;
    }
    // the suffix from y is at least h[y] long, so this vertex already pulls
    // a failure endpoint into the trapezoid
    for (const auto& d : dF)
      if (inside(d[y], std::min(a, h[y]))) return;
    for (const Arc& arc : g.neighbors(y)) {
      if (found) return;
      if (dfs.on_path[arc.to] || mask[arc.id] || h[arc.to] >= kInf) continue;
      const Dist est = a + arc.w + h[arc.to];
      if (est > bound) {
        next_bound = std::min(next_bound, est);
        continue;
      }
      dfs.push(arc.to, arc.w);
      if (dfs.lv0[j + 1] <= ell) self(self);
      dfs.pop();
    }
  };
  while (true) {
    next_bound = kInf;
    dfs.push(u, 0);
    rec(rec);
    dfs.pop();
    if (found) return found_len;
    if (next_bound >= kInf) return kInf;
    bound = next_bound;
  }
}

std::vector<Vertex> spanner_witness(const Graph& g, const LevelHierarchy& hier, Vertex s, Vertex t,
                                    const FailureSet& F) {
  const EdgeMask removed = F.mask(g);
  auto r = build_oracle_and_spanner(g, &removed, hier);
  if (r.oracle.query_modified(s, t) >= kInf) return {};
  return witness(r.oracle, g, &removed, s, t).path;
}

WellBehavedAudit audit_well_behaved(const SamplingForest& forest, const Graph& g, const FailureSet& F,
                                    const std::vector<Vertex>& P) {
  if (!forest.instrumented()) throw std::invalid_argument("audit needs an instrumented forest");
  const auto& prm = forest.params();
  const int h = prm.h;
  const std::int64_t K = prm.K;
  std::vector<EdgeId> path_edges;
  for (std::size_t i = 0; i + 1 < P.size(); ++i) {
    auto e = g.find_edge(P[i], P[i + 1]);
    if (!e) throw std::invalid_argument("witness is not a path of the graph");
    path_edges.push_back(*e);
  }
  std::sort(path_edges.begin(), path_edges.end());
  auto has = [](const std::vector<EdgeId>& sorted, EdgeId e) { return std::binary_search(sorted.begin(), sorted.end(), e); };
  std::vector<EdgeId> all(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) all[e] = e;

  WellBehavedAudit out;
  out.depth.resize(h + 1);
  constexpr std::uint8_t k1 = 1, k2 = 2, k3 = 4, kAll = 7;
  for (int t = 0; t < forest.trees(); ++t) {
    std::vector<std::vector<std::uint8_t>> flags(h + 1);
    for (int r = 0; r <= h; ++r) {
      const std::int64_t width = forest.offset(r + 1) - forest.offset(r);
      flags[r].assign(width, 0);
      const double cap = std::pow(static_cast<double>(K), static_cast<double>(h - r) / prm.f);
      for (std::int64_t q = 0; q < width; ++q) {
        const auto& x = forest.node(t, r, q);
        const std::vector<EdgeId>& A = r == 0 ? all : x.A_full;
        const std::vector<EdgeId>& Sy = r == 0 ? all : forest.node(t, r - 1, q / K).S;
        std::uint8_t fl = 0;
        bool p1 = true;
        for (EdgeId e : F.edges)
          if (has(Sy, e) && !has(A, e)) p1 = false;
        if (p1) fl |= k1;
        std::int64_t hit = 0;
        for (EdgeId e : path_edges) hit += has(A, e) ? 1 : 0;
        if (r == 0 || static_cast<double>(hit) < cap) fl |= k2;
        std::vector<EdgeId> leaf_spanner;
        if (r == h) {
          const EdgeMask removed = forest.leaf_host_mask({t, q});
          leaf_spanner = build_oracle_and_spanner(g, &removed, forest.hierarchy()).spanner;
        }
        const std::vector<EdgeId>& Sx = r == h ? leaf_spanner : x.S;
        bool p3 = true;
        for (EdgeId e : path_edges) p3 = p3 && has(Sx, e);
        if (p3) fl |= k3;
        flags[r][q] = fl;
        auto& d = out.depth[r];
        ++d.nodes;
        d.prop1 += p1;
        d.prop2 += (fl & k2) != 0;
        d.prop3 += p3;
        d.well_behaved += fl == kAll;
      }
    }
    for (int r = 0; r < h; ++r)
      for (std::size_t q = 0; q < flags[r].size(); ++q) {
        const std::uint8_t fy = flags[r][q];
        bool child1 = false;
        for (std::int64_t c = 0; c < K; ++c) {
          const std::uint8_t fx = flags[r + 1][q * K + c];
          child1 = child1 || (fx & k1);
          if (fy & k2) {
            ++out.p2_children;
            out.p2_children_ok += (fx & k2) != 0;
          }
          if (fy == kAll && (fx & k1) && (fx & k2)) {
            ++out.wb_children;
            out.wb_children_ok += fx == kAll;
          }
        }
        if (fy & k1) {
          ++out.p1_parents;
          out.p1_parents_with_child += child1;
        }
      }
  }
  return out;
}

}  // namespace ftdso
