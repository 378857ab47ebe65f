#include <gtest/gtest.h>

#include "expath_checks.hpp"
#include "ftdso/expath.hpp"
#include "ftdso/generators.hpp"
#include "ftdso/reference.hpp"
#include "ftdso/rng.hpp"

using namespace ftdso;

namespace {

Graph cycle4() { return make_cycle(4); }

EdgeMask mask_of(const Graph& g, std::initializer_list<std::pair<Vertex, Vertex>> es) {
  EdgeMask m(g.m(), 0);
  for (auto [a, b] : es) m[*g.find_edge(a, b)] = 1;
  return m;
}

Graph random_connected(Rng& rng, int n, double p, int max_w) {
  while (true) {
    Graph g(n);
    for (Vertex a = 0; a < n; ++a)
      for (Vertex b = a + 1; b < n; ++b)
        if (rng.bernoulli(p)) g.add_edge(a, b, max_w > 1 ? 1 + static_cast<int>(rng.below(max_w)) : 1);
    if (is_connected(g)) return g;
  }
}

EdgeMask random_mask(Rng& rng, const Graph& g, int max_size) {
  EdgeMask m(g.m(), 0);
  const int k = static_cast<int>(rng.below(max_size + 1));
  for (int i = 0; i < k && g.m() > 0; ++i) m[rng.below(g.m())] = 1;
  return m;
}

}  // namespace

TEST(ExpathParams, LogRangeAndCaps) {
  EXPECT_EQ(expath_log_range(1, 1), 1);
  EXPECT_EQ(expath_log_range(8, 1), 3);
  EXPECT_EQ(expath_log_range(9, 1), 4);
  EXPECT_EQ(expath_log_range(5, 3), 4);
  const int lg = 4;
  for (int j = 0; j <= 2 * lg; ++j) EXPECT_EQ(expath_block_cap(lg, j), expath_block_cap(lg, 2 * lg - j));
  EXPECT_EQ(expath_block_cap(lg, lg), 16);
  EXPECT_EQ(expath_block_cap(lg, 0), 1);
}

TEST(ExpathParams, BlockLevels) {
  using K = PathItem::Kind;
  ExpathBlock b;
  EXPECT_EQ(block_levels(b), 0);
  b.items = {{K::Piece, 0, 3}};
  EXPECT_EQ(block_levels(b), 0);
  b.items = {{K::Piece, 0, 3}, {K::Edge, 3, 4}, {K::Piece, 4, 6}};
  EXPECT_EQ(block_levels(b), 1);
  b.items = {{K::Piece, 0, 3}, {K::Piece, 3, 5}};
  EXPECT_EQ(block_levels(b), 1);
  b.items = {{K::Edge, 0, 1}};
  EXPECT_EQ(block_levels(b), 1);
  b.items = {{K::Edge, 0, 1}, {K::Edge, 1, 2}};
  EXPECT_EQ(block_levels(b), 2);
}

TEST(Decomposable, NothingRemoved) {
  Rng rng(3);
  Graph g = random_connected(rng, 15, 0.25, 1);
  APSPTable apsp(g);
  ExpathEngine eng(g, apsp);
  for (Vertex s = 0; s < g.n(); ++s) {
    auto d = eng.decomposable_sssp(nullptr, s, 0);
    for (Vertex v = 0; v < g.n(); ++v) EXPECT_EQ(d[v], apsp.dist(s, v));
  }
}

TEST(Decomposable, BrokenCanonicalPath) {
  Graph p = make_path(3);
  APSPTable ap(p);
  ExpathEngine ep(p, ap);
  auto A = mask_of(p, {{0, 1}});
  EXPECT_EQ(ep.decomposable_sssp(&A, 0, 0)[2], kInf);

  Graph c = cycle4();
  APSPTable ac(c);
  ExpathEngine ec(c, ac);
  auto B = mask_of(c, {{0, 1}});
  ASSERT_EQ(ac.path(0, 2), (std::vector<Vertex>{0, 1, 2}));
  EXPECT_EQ(ec.decomposable_sssp(&B, 0, 0)[2], kInf);
  EXPECT_EQ(ec.decomposable_sssp(&B, 0, 1)[2], 2);
}

TEST(Decomposable, MonotoneAndExactForFewFailures) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_connected(rng, 25, 0.15, trial % 2 ? 3 : 1);
    APSPTable apsp(g);
    ExpathEngine eng(g, apsp);
    EdgeMask A = random_mask(rng, g, 3);
    int a_size = 0;
    for (auto x : A) a_size += x;
    const Vertex s = static_cast<Vertex>(rng.below(g.n()));
    auto exact = canonical_dijkstra(g, s, &A).dist;
    std::vector<Dist> prev(g.n(), kInf);
    for (int ell = 0; ell <= 4; ++ell) {
      auto d = eng.decomposable_sssp(&A, s, ell);
      for (Vertex v = 0; v < g.n(); ++v) {
        EXPECT_GE(d[v], exact[v]);
        EXPECT_LE(d[v], prev[v]);
        if (a_size <= ell) EXPECT_EQ(d[v], exact[v]);
      }
      prev = d;
    }
  }
}

TEST(Expath, SameEndpoint) {
  Graph g = cycle4();
  APSPTable apsp(g);
  ExpathEngine eng(g, apsp);
  auto p = eng.shortest_expath(nullptr, 2, 2, 3, 0);
  EXPECT_EQ(p.length, 0);
  EXPECT_TRUE(verify_expath(g, apsp, nullptr, p, 3, 0));
}

TEST(Expath, NothingRemovedFollowsCanonicalPath) {
  Rng rng(5);
  Graph g = random_connected(rng, 20, 0.2, 1);
  APSPTable apsp(g);
  ExpathEngine eng(g, apsp);
  for (int q = 0; q < 30; ++q) {
    Vertex s = static_cast<Vertex>(rng.below(g.n())), t = static_cast<Vertex>(rng.below(g.n()));
    auto p = eng.shortest_expath(nullptr, s, t, 1, 0);
    EXPECT_EQ(p.length, apsp.dist(s, t));
    std::string why;
    EXPECT_TRUE(verify_expath(g, apsp, nullptr, p, 1, 0, &why)) << why;
    EXPECT_EQ(p.vertices(apsp), apsp.path(s, t));
  }
}

TEST(Expath, DisconnectedGivesInfinity) {
  Graph g = make_path(4);
  APSPTable apsp(g);
  ExpathEngine eng(g, apsp);
  auto A = mask_of(g, {{1, 2}});
  for (int lambda : {0, 1}) {
    auto p = eng.shortest_expath(&A, 0, 3, 3, lambda);
    EXPECT_TRUE(p.empty());
    EXPECT_EQ(p.length, kInf);
  }
}

TEST(Expath, C4DetourIsOneLevel) {
  Graph g = cycle4();
  APSPTable apsp(g);
  ExpathEngine eng(g, apsp);
  auto A = mask_of(g, {{0, 1}});
  auto p = eng.shortest_expath(&A, 0, 2, 1, 0);
  EXPECT_EQ(p.length, 2);
  EXPECT_EQ(p.vertices(apsp), (std::vector<Vertex>{0, 3, 2}));
  EXPECT_TRUE(verify_expath(g, apsp, &A, p, 1, 0));
}

// Small exhaustive comparison; the acceptance runner repeats this at full size.
TEST(Expath, AgreesWithCertificateSearch) {
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(5));
    Graph g = random_connected(rng, n, 0.3 + 0.5 * rng.uniform(), trial % 5 == 4 ? 3 : 1);
    APSPTable apsp(g);
    ExpathEngine eng(g, apsp);
    EdgeMask A = random_mask(rng, g, 3);
    const Vertex s = static_cast<Vertex>(rng.below(n)), t = static_cast<Vertex>(rng.below(n));
    for (int ell : {1, 3}) {
      auto dec = eng.decomposable_sssp(&A, s, ell);
      auto bdec = brute_decomposable_sssp(g, apsp, &A, s, ell);
      EXPECT_EQ(dec, bdec) << "trial " << trial << " ell " << ell;
      for (int lambda : {0, 1}) {
        auto p = eng.shortest_expath(&A, s, t, ell, lambda);
        Dist b = brute_shortest_expath(g, apsp, &A, s, t, ell, lambda);
        EXPECT_EQ(p.length, b) << "trial " << trial << " ell " << ell << " lambda " << lambda;
        if (!p.empty()) {
          std::string why;
          EXPECT_TRUE(verify_expath(g, apsp, &A, p, ell, lambda, &why)) << why;
          EXPECT_TRUE(ftdso::testing::prefix_bounds_hold(g, eng, &A, p, &why)) << why;
          EXPECT_LE(p.length, dec[t]);
        }
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 600);
}

TEST(Expath, PrefixBoundsOnLargerGraphs) {
  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    Graph g = random_connected(rng, 30, 0.12, 1);
    APSPTable apsp(g);
    ExpathEngine eng(g, apsp);
    EdgeMask A = random_mask(rng, g, 4);
    const Vertex s = static_cast<Vertex>(rng.below(g.n())), t = static_cast<Vertex>(rng.below(g.n()));
    for (int lambda : {0, 2}) {
      auto p = eng.shortest_expath(&A, s, t, 5, lambda);
      std::string why;
      if (p.empty()) continue;
      EXPECT_TRUE(verify_expath(g, apsp, &A, p, 5, lambda, &why)) << why;
      EXPECT_TRUE(ftdso::testing::prefix_bounds_hold(g, eng, &A, p, &why)) << why;
      EXPECT_GE(p.length, canonical_dijkstra(g, s, &A).dist[t]);
    }
  }
}

TEST(VerifyExpath, RejectsCorruptions) {
  Rng rng(7);
  int mutated = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Graph g = random_connected(rng, 14, 0.25, 1);
    APSPTable apsp(g);
    ExpathEngine eng(g, apsp);
    EdgeMask A = random_mask(rng, g, 2);
    Vertex s = 0, t = static_cast<Vertex>(1 + rng.below(g.n() - 1));
    auto p = eng.shortest_expath(&A, s, t, 3, 0);
    if (p.empty()) continue;
    ASSERT_TRUE(verify_expath(g, apsp, &A, p, 3, 0));

    // a removed edge on the expath must be noticed
    auto vs = p.vertices(apsp);
    EdgeMask A2 = A;
    A2[*g.find_edge(vs[0], vs[1])] = 1;
    EXPECT_FALSE(verify_expath(g, apsp, &A2, p, 3, 0));

    // push a block past its cap
    for (auto& b : p.blocks) {
      if (b.items.empty()) continue;
      auto bad = p;
      auto& bb = bad.blocks[b.phase];
      bb.length = expath_block_cap(eng.log_range(), b.phase) + 1;
      bad.length += bb.length - b.length;
      EXPECT_FALSE(verify_expath(g, apsp, &A, bad, 3, 0));
      ++mutated;
      break;
    }
    auto bad = p;
    bad.length += 1;
    EXPECT_FALSE(verify_expath(g, apsp, &A, bad, 3, 0));
    EXPECT_FALSE(verify_expath(g, apsp, &A, p, 0, 0) && p.length != apsp.dist(s, t));
  }
  EXPECT_GT(mutated, 20);
}

TEST(VerifyExpath, PieceThroughRemovedEdge) {
  Graph g = cycle4();
  APSPTable apsp(g);
  ExpathStructure p;
  p.s = 0;
  p.t = 2;
  p.prefix = {0};
  p.suffix = {2};
  const int lg = expath_log_range(g.n(), 1);
  for (int i = 0; i <= 2 * lg; ++i) p.blocks.push_back({i, {}, 0});
  p.blocks[lg].items = {{PathItem::Kind::Piece, 0, 2}};
  p.blocks[lg].length = 2;
  p.length = 2;
  EXPECT_TRUE(verify_expath(g, apsp, nullptr, p, 1, 0));
  auto A = mask_of(g, {{1, 2}});
  EXPECT_FALSE(verify_expath(g, apsp, &A, p, 1, 0));
}
