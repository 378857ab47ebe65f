#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ftdso/generators.hpp"
#include "ftdso/rng.hpp"
#include "ftdso/tz_oracle.hpp"
#include "tz_reference.hpp"

using namespace ftdso;
using ftdso::testing::tz_original_query;

namespace {

std::vector<std::vector<Dist>> all_pairs(const Graph& g, const EdgeMask* removed) {
  std::vector<std::vector<Dist>> d;
  for (Vertex s = 0; s < g.n(); ++s) d.push_back(canonical_dijkstra(g, s, removed).dist);
  return d;
}

EdgeMask complement(const Graph& g, const std::vector<EdgeId>& keep) {
  EdgeMask m(g.m(), 1);
  for (EdgeId e : keep) m[e] = 0;
  return m;
}

}  // namespace

TEST(Hierarchy, DegenerateCases) {
  auto h1 = sample_hierarchy(10, 1, 5);
  EXPECT_EQ(h1.level(0).size(), 10u);
  EXPECT_TRUE(h1.level(1).empty());
  auto h0 = sample_hierarchy(0, 2, 5);
  EXPECT_TRUE(h0.level(0).empty());
}

TEST(Hierarchy, NestedAndDeterministic) {
  auto a = sample_hierarchy(500, 3, 9), b = sample_hierarchy(500, 3, 9);
  EXPECT_EQ(a.top, b.top);
  for (int i = 1; i < 3; ++i)
    for (Vertex v : a.level(i)) EXPECT_TRUE(a.in(i - 1, v));
}

TEST(Hierarchy, LevelSizeStatistics) {
  // |X_1| ~ Bin(n, n^{-1/2}); the mean over 100 seeds has sd sqrt(n p (1-p) / 100).
  const int n = 10000, seeds = 100;
  double p = 1.0 / std::sqrt(n);
  double total = 0;
  for (int s = 0; s < seeds; ++s) total += sample_hierarchy(n, 2, 1000 + s).level(1).size();
  double sd = std::sqrt(n * p * (1 - p) / seeds);
  EXPECT_NEAR(total / seeds, n * p, 3 * sd);
}

TEST(TZOracle, EmptyHost) {
  Graph g(8);
  auto hier = sample_hierarchy(8, 2, 3);
  auto r = build_oracle_and_spanner(g, nullptr, hier);
  EXPECT_TRUE(r.spanner.empty());
  for (Vertex v = 0; v < 8; ++v) {
    EXPECT_EQ(r.oracle.pivot(0, v), v);
    EXPECT_EQ(r.oracle.pivot(1, v), hier.in(1, v) ? v : kNoVertex);
    for (Vertex u = 0; u < 8; ++u) EXPECT_EQ(r.oracle.query_modified(v, u), u == v ? 0 : kInf);
  }
}

TEST(TZOracle, PathWithKOneKeepsEverything) {
  Graph g = make_path(12);
  auto r = build_oracle_and_spanner(g, nullptr, sample_hierarchy(12, 1, 1));
  EXPECT_EQ(static_cast<int>(r.spanner.size()), g.m());
  for (Vertex s = 0; s < 12; ++s)
    for (Vertex t = 0; t < 12; ++t) EXPECT_EQ(r.oracle.query_modified(s, t), std::abs(s - t));
}

TEST(TZOracle, SpannerStretchThree) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Graph g = make_er(60, 0.1, seed);
    auto r = build_oracle_and_spanner(g, nullptr, sample_hierarchy(60, 2, seed));
    auto dh = all_pairs(g, nullptr);
    EdgeMask sm = complement(g, r.spanner);
    auto ds = all_pairs(g, &sm);
    for (Vertex s = 0; s < 60; ++s)
      for (Vertex t = 0; t < 60; ++t) {
        EXPECT_GE(ds[s][t], dh[s][t]);
        EXPECT_LE(ds[s][t], mul_sat(dh[s][t], 3));
      }
  }
}

TEST(TZOracle, SandwichAndOriginalQueryComparison) {
  for (int k = 1; k <= 3; ++k)
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      Graph g = make_er(80, 0.08, seed * 10 + k);
      EdgeMask removed(g.m(), 0);
      Rng rng(seed);
      for (EdgeId e = 0; e < g.m(); ++e) removed[e] = rng.bernoulli(0.1);
      auto r = build_oracle_and_spanner(g, &removed, sample_hierarchy(80, k, seed));
      auto dh = all_pairs(g, &removed);
      for (Vertex s = 0; s < 80; ++s)
        for (Vertex t = 0; t < 80; ++t) {
          Dist q = r.oracle.query_modified(s, t), orig = tz_original_query(r.oracle, s, t);
          EXPECT_GE(q, dh[s][t]);
          EXPECT_LE(q, mul_sat(dh[s][t], 2 * k - 1));
          EXPECT_LE(q, orig);
          EXPECT_GE(orig, dh[s][t]);
          if (k == 1) EXPECT_EQ(q, dh[s][t]);
        }
    }
}

TEST(TZOracle, BunchInvariants) {
  Graph g = make_er(70, 0.07, 21);
  auto hier = sample_hierarchy(70, 3, 21);
  auto r = build_oracle_and_spanner(g, nullptr, hier);
  auto d = all_pairs(g, nullptr);
  const auto& o = r.oracle;
  for (Vertex v = 0; v < 70; ++v) {
    for (int i = 0; i < 3; ++i) {
      Dist dnext = kInf;
      if (i + 1 < 3)
        for (Vertex y : hier.level(i + 1)) dnext = std::min(dnext, d[v][y]);
      Vertex p = o.pivot(i, v);
      if (p != kNoVertex) {
        EXPECT_TRUE(o.in_bunch(i, v, p));
        EXPECT_EQ(o.pivot_dist(i, v), d[v][p]);
        for (Vertex y : hier.level(i))  // closest, ties to smaller label
          EXPECT_TRUE(d[v][y] > d[v][p] || (d[v][y] == d[v][p] && y >= p));
      }
      for (Vertex x : hier.level(i)) {
        bool expect = (d[v][x] < dnext && d[v][x] < kInf) || x == p;
        EXPECT_EQ(o.in_bunch(i, v, x), expect) << v << " " << i << " " << x;
      }
    }
    for (const auto& e : o.bunch(v)) EXPECT_EQ(e.d, d[v][e.x()]);
  }
}

TEST(TZOracle, InsertionOrderIndependent) {
  Graph g = make_er(50, 0.1, 4);
  std::vector<EdgeId> order(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) order[e] = e;
  Rng rng(8);
  std::shuffle(order.begin(), order.end(), rng.engine());
  Graph h(g.n());
  for (EdgeId e : order) h.add_edge(g.edge(e).v, g.edge(e).u);
  auto hier = sample_hierarchy(50, 2, 4);
  auto a = build_oracle_and_spanner(g, nullptr, hier), b = build_oracle_and_spanner(h, nullptr, hier);
  for (Vertex v = 0; v < 50; ++v) {
    for (int i = 0; i < 2; ++i) EXPECT_EQ(a.oracle.pivot(i, v), b.oracle.pivot(i, v));
    auto ba = a.oracle.bunch(v), bb = b.oracle.bunch(v);
    ASSERT_EQ(ba.size(), bb.size());
    for (std::size_t j = 0; j < ba.size(); ++j) {
      EXPECT_EQ(ba[j].packed, bb[j].packed);
      EXPECT_EQ(ba[j].d, bb[j].d);
    }
  }
  std::vector<std::pair<Vertex, Vertex>> ea, eb;
  for (EdgeId e : a.spanner) ea.emplace_back(std::min(g.edge(e).u, g.edge(e).v), std::max(g.edge(e).u, g.edge(e).v));
  for (EdgeId e : b.spanner) eb.emplace_back(std::min(h.edge(e).u, h.edge(e).v), std::max(h.edge(e).u, h.edge(e).v));
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  EXPECT_EQ(ea, eb);
}

TEST(TZOracle, WitnessExamples) {
  Graph g = make_path(2);
  auto r = build_oracle_and_spanner(g, nullptr, sample_hierarchy(2, 1, 1));
  auto w = witness(r.oracle, g, nullptr, 0, 0);
  EXPECT_EQ(w.path, std::vector<Vertex>{0});
  EXPECT_EQ(w.interconnect, 0);
  EXPECT_EQ(witness(r.oracle, g, nullptr, 0, 1).path, (std::vector<Vertex>{0, 1}));
  Graph two(2);
  auto e = build_oracle_and_spanner(two, nullptr, sample_hierarchy(2, 1, 1));
  EXPECT_THROW(witness(e.oracle, two, nullptr, 0, 1), GraphError);
}

TEST(TZOracle, WitnessRealizedInSpanner) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Graph g = make_er(70, 0.08, seed);
    EdgeMask removed(g.m(), 0);
    Rng rng(seed + 50);
    for (EdgeId e = 0; e < g.m(); ++e) removed[e] = rng.bernoulli(0.15);
    auto r = build_oracle_and_spanner(g, &removed, sample_hierarchy(70, 2, seed));
    EdgeMask in_spanner(g.m(), 0);
    for (EdgeId e : r.spanner) in_spanner[e] = 1;
    for (EdgeId e : r.spanner) EXPECT_EQ(removed[e], 0);
    for (Vertex s = 0; s < 70; ++s)
      for (Vertex t = 0; t < 70; ++t) {
        Dist q = r.oracle.query_modified(s, t);
        if (q >= kInf) continue;
        auto w = witness(r.oracle, g, &removed, s, t);
        ASSERT_EQ(w.path.front(), s);
        ASSERT_EQ(w.path.back(), t);
        Dist len = 0;
        for (std::size_t i = 0; i + 1 < w.path.size(); ++i) {
          auto e = g.find_edge(w.path[i], w.path[i + 1]);
          ASSERT_TRUE(e.has_value());
          EXPECT_TRUE(in_spanner[*e]);
          len += g.edge(*e).w;
        }
        EXPECT_EQ(len, q);
      }
  }
}

TEST(TZOracle, InheritanceUpperBoundHolds) {
  // For H inside G' keeping the witness path of G', the oracle on H never
  // reports more than the length of that path.
  Rng rng(99);
  for (int rep = 0; rep < 40; ++rep) {
    Graph g = make_er(50, 0.1, 500 + rep);
    auto hier = sample_hierarchy(50, 2, rep);
    EdgeMask gp(g.m(), 0);
    for (EdgeId e = 0; e < g.m(); ++e) gp[e] = rng.bernoulli(0.1);
    TZBuilder b(g, hier);
    TZOracle og = b.build(&gp);
    Vertex s = static_cast<Vertex>(rng.below(50)), t = static_cast<Vertex>(rng.below(50));
    if (og.query_modified(s, t) >= kInf) continue;
    auto w = witness(og, g, &gp, s, t);
    EdgeMask keep(g.m(), 0);
    for (std::size_t i = 0; i + 1 < w.path.size(); ++i) keep[*g.find_edge(w.path[i], w.path[i + 1])] = 1;
    EdgeMask h = gp;
    for (EdgeId e = 0; e < g.m(); ++e)
      if (!keep[e] && rng.bernoulli(0.3)) h[e] = 1;
    TZOracle oh = b.build(&h);
    Dist len = static_cast<Dist>(og.query_modified(s, t));
    EXPECT_LE(oh.query_modified(s, t), len);
    EXPECT_GE(oh.query_modified(s, t), canonical_dijkstra(g, s, &h).dist[t]);
  }
}

TEST(TZOracle, MaskMatchesExplicitSubgraph) {
  Graph g = make_er(40, 0.15, 12);
  EdgeMask removed(g.m(), 0);
  Rng rng(3);
  for (EdgeId e = 0; e < g.m(); ++e) removed[e] = rng.bernoulli(0.4);
  Graph h(g.n());
  for (EdgeId e = 0; e < g.m(); ++e)
    if (!removed[e]) h.add_edge(g.edge(e).u, g.edge(e).v);
  auto hier = sample_hierarchy(40, 2, 12);
  auto a = build_oracle_and_spanner(g, &removed, hier), b = build_oracle_and_spanner(h, nullptr, hier);
  for (Vertex s = 0; s < 40; ++s)
    for (Vertex t = 0; t < 40; ++t) EXPECT_EQ(a.oracle.query(s, t).value, b.oracle.query(s, t).value);
}

TEST(TZOracle, SerializationRoundTrip) {
  Graph g = make_er(40, 0.1, 2);
  auto r = build_oracle_and_spanner(g, nullptr, sample_hierarchy(40, 2, 2));
  std::vector<std::uint8_t> buf;
  r.oracle.serialize(buf);
  const std::uint8_t* p = buf.data();
  TZOracle o = TZOracle::deserialize(p, buf.data() + buf.size());
  EXPECT_EQ(p, buf.data() + buf.size());
  for (Vertex s = 0; s < 40; ++s)
    for (Vertex t = 0; t < 40; ++t) EXPECT_EQ(o.query_modified(s, t), r.oracle.query_modified(s, t));
}
