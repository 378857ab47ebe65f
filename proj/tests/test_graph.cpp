#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "ftdso/generators.hpp"
#include "ftdso/rng.hpp"
#include "ftdso/shortest_paths.hpp"

using namespace ftdso;

namespace {

// Same edges inserted in a shuffled order, with shuffled endpoint order.
Graph permuted_copy(const Graph& g, std::uint64_t seed, std::vector<EdgeId>& new_id) {
  std::vector<EdgeId> order(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) order[e] = e;
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng.engine());
  Graph h(g.n());
  new_id.assign(g.m(), kNoEdge);
  for (EdgeId e : order) {
    const Edge& ed = g.edge(e);
    new_id[e] = rng.bernoulli(0.5) ? h.add_edge(ed.u, ed.v, ed.w) : h.add_edge(ed.v, ed.u, ed.w);
  }
  return h;
}

// All shortest s-t paths by exhaustive DFS over the distance DAG; the
// canonical one is the minimum in the vertex-set order.
std::vector<Vertex> brute_canonical(const Graph& g, Vertex s, Vertex t) {
  auto d = canonical_dijkstra(g, t).dist;
  if (d[s] >= kInf) return {};
  std::vector<std::vector<Vertex>> all;
  std::vector<Vertex> cur{s};
  std::function<void(Vertex)> dfs = [&](Vertex x) {
    if (x == t) {
      all.push_back(cur);
      return;
    }
    for (const Arc& a : g.neighbors(x))
      if (d[a.to] + a.w == d[x]) {
        cur.push_back(a.to);
        dfs(a.to);
        cur.pop_back();
      }
  };
  dfs(s);
  auto less = [](const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
    std::set<Vertex> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::vector<Vertex> diff;
    std::set_symmetric_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(diff));
    return !diff.empty() && sa.count(diff.front());
  };
  return *std::min_element(all.begin(), all.end(), less);
}

}  // namespace

TEST(Dimacs, SmallestGraph) {
  Graph g = parse_dimacs("p sp 2 1\na 1 2 1\n");
  EXPECT_EQ(g.n(), 2);
  EXPECT_EQ(g.m(), 1);
  EXPECT_EQ(g.edge(0).u, 0);
  EXPECT_EQ(g.edge(0).v, 1);
  EXPECT_EQ(g.edge(0).w, 1);
}

TEST(Dimacs, Triangle) {
  Graph g = parse_dimacs("c tri\np sp 3 3\na 1 2 1\na 2 3 1\na 3 1 1\n");
  EXPECT_EQ(g.n(), 3);
  EXPECT_EQ(g.m(), 3);
  for (Vertex v = 0; v < 3; ++v) EXPECT_EQ(g.neighbors(v).size(), 2u);
}

TEST(Dimacs, RejectsSelfLoop) {
  EXPECT_THROW(parse_dimacs("p sp 2 1\na 1 1 1\n"), GraphError);
}

TEST(Dimacs, RejectsDuplicateAndFoldsReverseArc) {
  EXPECT_THROW(parse_dimacs("p sp 2 2\na 1 2 1\na 1 2 1\n"), GraphError);
  Graph g = parse_dimacs("p sp 2 2\na 1 2 3\na 2 1 3\n");
  EXPECT_EQ(g.m(), 1);
  EXPECT_THROW(parse_dimacs("p sp 2 2\na 1 2 3\na 2 1 4\n"), GraphError);
}

TEST(Dimacs, ErrorsCarryLineNumbers) {
  try {
    parse_dimacs("p sp 3 1\nc ok\na 1 x 1\n");
    FAIL();
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Dimacs, WriteReadRoundTrip) {
  Graph g = make_er(30, 0.2, 7);
  std::ostringstream out;
  write_dimacs(g, out);
  Graph h = parse_dimacs(out.str());
  ASSERT_EQ(h.m(), g.m());
  for (EdgeId e = 0; e < g.m(); ++e) {
    EXPECT_EQ(h.edge(e).u, g.edge(e).u);
    EXPECT_EQ(h.edge(e).v, g.edge(e).v);
  }
}

TEST(CanonicalDijkstra, PathGraph) {
  Graph g = make_path(4);
  auto r = canonical_dijkstra(g, 0);
  EXPECT_EQ(r.dist[3], 3);
  EdgeMask mask(g.m(), 0);
  mask[*g.find_edge(1, 2)] = 1;
  EXPECT_EQ(canonical_dijkstra(g, 0, &mask).dist[3], kInf);
}

TEST(CanonicalDijkstra, HopCapOnFiveCycle) {
  Graph g = make_cycle(5);
  auto r = canonical_dijkstra(g, 0, nullptr, 2);
  EXPECT_EQ(r.dist[2], 2);
  EXPECT_EQ(r.dist[3], 2);
  auto r1 = canonical_dijkstra(g, 0, nullptr, 1);
  EXPECT_EQ(r1.dist[2], kInf);
}

TEST(CanonicalDijkstra, MatchesExhaustiveCanonicalPath) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Graph g = make_er(9, 0.45, seed);
    for (Vertex s = 0; s < g.n(); ++s) {
      auto r = canonical_dijkstra(g, s);
      for (Vertex t = 0; t < g.n(); ++t) EXPECT_EQ(r.path_to(t), brute_canonical(g, s, t)) << seed;
    }
  }
}

TEST(CanonicalDijkstra, WeightedMatchesExhaustiveCanonicalPath) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Graph base = make_er(9, 0.5, seed);
    Graph g(base.n());
    Rng rng(seed * 31);
    for (const Edge& e : base.edges()) g.add_edge(e.u, e.v, 1 + static_cast<int>(rng.below(3)));
    for (Vertex s = 0; s < g.n(); ++s) {
      auto r = canonical_dijkstra(g, s);
      for (Vertex t = 0; t < g.n(); ++t) EXPECT_EQ(r.path_to(t), brute_canonical(g, s, t)) << seed;
    }
  }
}

TEST(CanonicalDijkstra, InsertionOrderIndependent) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Graph g = make_er(60, 0.1, seed);
    std::vector<EdgeId> map;
    Graph h = permuted_copy(g, seed + 100, map);
    for (Vertex s = 0; s < g.n(); s += 7) {
      auto a = canonical_dijkstra(g, s), b = canonical_dijkstra(h, s);
      EXPECT_EQ(a.parent, b.parent);
      EXPECT_EQ(a.dist, b.dist);
    }
  }
}

TEST(CanonicalDijkstra, SymmetricAndSubpathClosed) {
  Graph g = make_er(50, 0.12, 3);
  APSPTable apsp(g);
  for (Vertex u = 0; u < g.n(); ++u)
    for (Vertex v = 0; v < g.n(); ++v) {
      auto p = apsp.path(u, v), q = apsp.path(v, u);
      std::reverse(q.begin(), q.end());
      ASSERT_EQ(p, q);
      for (std::size_t i = 0; i < p.size(); ++i) {
        auto pre = apsp.path(u, p[i]);
        ASSERT_TRUE(std::equal(pre.begin(), pre.end(), p.begin()));
      }
    }
}

TEST(CanonicalDijkstra, HopCapMonotone) {
  Graph g = make_er(40, 0.08, 11);
  auto exact = canonical_dijkstra(g, 0).dist;
  std::vector<Dist> prev(g.n(), kInf);
  for (int cap = 1; cap <= 12; ++cap) {
    auto d = hop_bounded_dist(g, 0, cap);
    for (Vertex v = 0; v < g.n(); ++v) {
      EXPECT_LE(d[v], prev[v]);
      EXPECT_GE(d[v], exact[v]);
    }
    prev = d;
  }
  auto d = hop_bounded_sssp(g, 0, 39, nullptr, true);
  EXPECT_EQ(d.dist, exact);
  for (Vertex v = 0; v < g.n(); ++v) {
    auto p = d.path_to(v);
    if (exact[v] >= kInf) continue;
    EXPECT_EQ(static_cast<Dist>(p.size()) - 1, exact[v]);
  }
}

TEST(CanonicalDijkstra, HopPathsRespectCap) {
  Graph base = make_er(30, 0.15, 5);
  Graph g(base.n());
  Rng rng(9);
  for (const Edge& e : base.edges()) g.add_edge(e.u, e.v, 1 + static_cast<int>(rng.below(4)));
  for (int cap = 1; cap <= 6; ++cap) {
    auto r = hop_bounded_sssp(g, 0, cap, nullptr, true);
    auto fast = hop_bounded_dist(g, 0, cap);
    EXPECT_EQ(r.dist, fast);
    for (Vertex v = 0; v < g.n(); ++v) {
      if (r.dist[v] >= kInf) continue;
      auto p = r.path_to(v);
      ASSERT_LE(static_cast<int>(p.size()) - 1, cap);
      Dist len = 0;
      for (std::size_t i = 0; i + 1 < p.size(); ++i) len += g.edge(*g.find_edge(p[i], p[i + 1])).w;
      EXPECT_EQ(len, r.dist[v]);
    }
  }
}

TEST(Apsp, SmallExamples) {
  Graph tri = make_cycle(3);
  APSPTable a(tri);
  for (Vertex x = 0; x < 3; ++x)
    for (Vertex y = 0; y < 3; ++y) EXPECT_EQ(a.dist(x, y), x == y ? 0 : 1);
  Graph path = make_path(3);
  APSPTable b(path);
  EXPECT_EQ(b.dist(0, 2), 2);
  EXPECT_EQ(b.pred(0, 2), 1);
}

TEST(Apsp, AgreesWithSingleSourceAndInvariants) {
  Graph g = make_er(20, 0.3, 17);
  APSPTable a(g);
  for (Vertex x = 0; x < g.n(); ++x) {
    auto r = canonical_dijkstra(g, x);
    for (Vertex y = 0; y < g.n(); ++y) {
      EXPECT_EQ(a.dist(x, y), r.dist[y]);
      EXPECT_EQ(a.dist(x, y), a.dist(y, x));
      EXPECT_EQ(a.pred(x, y), x == y ? kNoVertex : r.parent[y]);
      for (Vertex z = 0; z < g.n(); ++z) EXPECT_LE(a.dist(x, y), add_sat(a.dist(x, z), a.dist(z, y)));
      auto p = a.path(x, y);
      EXPECT_EQ(static_cast<Dist>(p.size()) - 1, a.dist(x, y));
      EXPECT_EQ(static_cast<int>(p.size()) - 1, a.hops(x, y));
    }
  }
}

TEST(SpTree, StarAndPath) {
  Graph star(6);
  for (Vertex v = 1; v < 6; ++v) star.add_edge(0, v);
  SPTreeWithLCA t(star, 0);
  EXPECT_EQ(t.lca(2, 4), 0);
  SPTreeWithLCA p(make_path(5), 0);
  EXPECT_EQ(p.lca(1, 3), 1);
}

TEST(SpTree, LcaMatchesNaiveWalk) {
  Rng rng(123);
  Graph tree(50);
  for (Vertex v = 1; v < 50; ++v) tree.add_edge(static_cast<Vertex>(rng.below(v)), v);
  SPTreeWithLCA t(tree, 0);
  for (Vertex a = 0; a < 50; ++a)
    for (Vertex b = 0; b < 50; ++b) {
      std::set<Vertex> anc;
      for (Vertex x = a; x != kNoVertex; x = t.parent(x)) anc.insert(x);
      Vertex y = b;
      while (!anc.count(y)) y = t.parent(y);
      EXPECT_EQ(t.lca(a, b), y);
    }
}

TEST(SpTree, EdgeOnCanonicalPathExamples) {
  Graph g = make_path(4);
  SPTreeWithLCA t(g, 0);
  EXPECT_TRUE(edge_on_canonical_path(t, g, 0, 3, *g.find_edge(1, 2)));
  EXPECT_FALSE(edge_on_canonical_path(t, g, 2, 3, *g.find_edge(0, 1)));
}

TEST(SpTree, EdgeOnCanonicalPathMatchesReconstruction) {
  Rng rng(77);
  for (int rep = 0; rep < 5; ++rep) {
    Graph g = make_er(30, 0.15, 200 + rep);
    APSPTable apsp(g);
    Vertex root = static_cast<Vertex>(rng.below(g.n()));
    SPTreeWithLCA t(g, root);
    for (int q = 0; q < 100; ++q) {
      Vertex v = static_cast<Vertex>(rng.below(g.n())), w = static_cast<Vertex>(rng.below(g.n()));
      if (!t.contains(v) || !t.contains(w) || g.m() == 0) continue;
      EdgeId e = static_cast<EdgeId>(rng.below(g.m()));
      std::set<EdgeId> on;
      Vertex a = v, b = w;
      while (a != b) {
        if (t.depth(a) >= t.depth(b)) {
          on.insert(t.parent_edge(a));
          a = t.parent(a);
        } else {
          on.insert(t.parent_edge(b));
          b = t.parent(b);
        }
      }
      if (t.lca(v, w) == root) {
        std::set<EdgeId> concat;
        for (auto path : {apsp.path(v, root), apsp.path(root, w)})
          for (std::size_t i = 0; i + 1 < path.size(); ++i) concat.insert(*g.find_edge(path[i], path[i + 1]));
        EXPECT_EQ(on, concat);
      }
      EXPECT_EQ(edge_on_canonical_path(t, g, v, w, e), on.count(e) > 0);
    }
  }
}

TEST(Generators, Basics) {
  Graph g = make_grid(2, 2);
  EXPECT_EQ(g.n(), 4);
  EXPECT_EQ(g.m(), 4);
  Graph k = make_er(100, 1.0, 1);
  EXPECT_EQ(k.m(), 100 * 99 / 2);
  EXPECT_EQ(generate_from_spec("er:10:0.0", 1, true).n(), 1);
  EXPECT_THROW(generate_from_spec("er:x:1", 1), GraphError);
  EXPECT_THROW(generate_from_spec("cube:1:1", 1), GraphError);
}

TEST(Generators, RggMeanDegree) {
  // Interior vertices see pi r^2 (n-1) neighbours; boundary effects lower the
  // expectation to roughly (pi r^2 - 8 r^3 / 3 + r^4 / 2)(n-1) on the unit square.
  const int n = 200;
  const double r = 0.1;
  double expected = (M_PI * r * r - 8.0 * r * r * r / 3.0 + r * r * r * r / 2.0) * (n - 1);
  double total = 0;
  const int reps = 20;
  for (int i = 0; i < reps; ++i) total += 2.0 * make_rgg(n, r, 1000 + i).m() / n;
  EXPECT_NEAR(total / reps, expected, 0.1 * expected);
}

TEST(FailureSet, Validation) {
  Graph g = make_path(4);
  FailureSet f({2, 0, 2});
  EXPECT_EQ(f.size(), 2u);
  EXPECT_NO_THROW(f.validate(g, 2));
  EXPECT_THROW(f.validate(g, 1), GraphError);
  EXPECT_THROW(FailureSet({7}).validate(g, 2), GraphError);
  EXPECT_EQ(f.endpoints(g), (std::vector<Vertex>{0, 1, 2, 3}));
}
