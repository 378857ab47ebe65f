#include <gtest/gtest.h>

#include <cmath>

#include "ftdso/forest.hpp"
#include "ftdso/generators.hpp"
#include "ftdso/reference.hpp"
#include "ftdso/rng.hpp"

using namespace ftdso;

namespace {

bool subset(const std::vector<EdgeId>& a, const std::vector<EdgeId>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<LeafHandle> all_leaves(const SamplingForest& F) {
  std::vector<LeafHandle> out;
  const auto width = F.offset(F.params().h + 1) - F.offset(F.params().h);
  for (int t = 0; t < F.trees(); ++t)
    for (std::int64_t q = 0; q < width; ++q) out.push_back({t, q});
  return out;
}

// Failure set biased towards the canonical s-t path so that it matters.
FailureSet sample_failures(Rng& rng, const Graph& g, const APSPTable& apsp, Vertex s, Vertex t, int f) {
  std::vector<EdgeId> es;
  auto path = apsp.path(s, t);
  for (int i = 0; i < f; ++i) {
    if (path.size() >= 2 && rng.bernoulli(0.7)) {
      auto j = rng.below(path.size() - 1);
      es.push_back(*g.find_edge(path[j], path[j + 1]));
    } else if (g.m() > 0) {
      es.push_back(static_cast<EdgeId>(rng.below(g.m())));
    }
  }
  return FailureSet(es);
}

}  // namespace

TEST(ForestParams, DerivedValues) {
  auto a = derive_params(100, 16, 2, 2, 1.0);
  EXPECT_EQ(a.h, 2);
  EXPECT_EQ(a.K, 48);
  EXPECT_DOUBLE_EQ(a.p, std::pow(48.0, -0.5));
  EXPECT_EQ(a.J[0], 4 * 48 * 48);
  EXPECT_EQ(a.J[1], 4 * 48);
  EXPECT_EQ(a.J[2], 1);
  EXPECT_EQ(a.I, static_cast<int>(std::ceil(121 * std::log(100.0))));

  auto b = derive_params(10, 2, 1, 1, 1.0);
  EXPECT_EQ(b.h, 1);
  EXPECT_EQ(b.K, 2);
  EXPECT_DOUBLE_EQ(b.p, 0.5);
  EXPECT_EQ(b.J[0], 8);

  EXPECT_THROW(derive_params(10, 1, 1, 1, 1.0), std::invalid_argument);
  EXPECT_THROW(derive_params(10, 4, 0, 1, 1.0), std::invalid_argument);
  EXPECT_THROW(derive_params(10, 4, 1, 1, 0.0), std::invalid_argument);
}

TEST(Forest, TriangleLeavesAreExact) {
  Graph g = make_cycle(3);
  auto P = derive_params(g.n(), 2, 1, 1, 1.0);
  auto hier = sample_hierarchy(g.n(), 1, 1);
  auto F = build_forest(g, P, hier, 5);
  for (auto l : all_leaves(F)) {
    auto mask = F.leaf_host_mask(l);
    auto o = F.leaf_oracle(l);
    for (Vertex s = 0; s < 3; ++s) {
      auto d = canonical_dijkstra(g, s, &mask).dist;
      for (Vertex t = 0; t < 3; ++t) EXPECT_EQ(o->query_modified(s, t), d[t]);
    }
  }
}

TEST(Forest, EmptyGraph) {
  Graph g(6);
  auto P = derive_params(g.n(), 4, 1, 2, 0.5);
  auto F = build_forest(g, P, sample_hierarchy(g.n(), 2, 3), 9);
  EXPECT_EQ(F.stats().s_entries, 0);
  EXPECT_EQ(F.query_short(0, 0, {}), 0);
  for (Vertex t = 1; t < 6; ++t) EXPECT_EQ(F.query_short(0, t, {}), kInf);
}

TEST(Forest, StructuralAudit) {
  Graph g = largest_component(make_er(40, 0.15, 17));
  auto P = derive_params(g.n(), 4, 1, 2, 0.3);
  ForestOptions opts;
  opts.instrument = true;
  auto F = build_forest(g, P, sample_hierarchy(g.n(), 2, 4), 21, opts);
  const int h = P.h;
  std::vector<EdgeId> all(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) all[e] = e;
  for (int t = 0; t < F.trees(); ++t) {
    for (int r = 0; r < h; ++r) {
      const auto width = F.offset(r + 1) - F.offset(r);
      for (std::int64_t q = 0; q < width; ++q) {
        const auto& y = F.node(t, r, q);
        EXPECT_TRUE(std::is_sorted(y.S.begin(), y.S.end()));
        const auto& parent_S = r == 0 ? all : F.node(t, r - 1, q / P.K).S;
        EXPECT_TRUE(subset(y.S, parent_S));
        for (std::int64_t c = 0; c < P.K; ++c) {
          const auto& x = F.node(t, r + 1, q * P.K + c);
          EXPECT_TRUE(subset(x.A, y.S));
          const auto& yA = r == 0 ? all : y.A_full;
          EXPECT_TRUE(subset(x.A_full, yA));
          std::vector<EdgeId> expect;
          std::set_intersection(x.A_full.begin(), x.A_full.end(), y.S.begin(), y.S.end(),
                                std::back_inserter(expect));
          EXPECT_EQ(x.A, expect);
        }
      }
    }
  }
  EXPECT_EQ(F.stats().leaves, static_cast<std::int64_t>(F.trees()) * P.K);
}

TEST(Forest, SurvivingLeavesRespectFailures) {
  Graph g = largest_component(make_er(50, 0.12, 8));
  auto P = derive_params(g.n(), 6, 2, 2, 0.02);
  ForestOptions opts;
  opts.instrument = true;
  auto F = build_forest(g, P, sample_hierarchy(g.n(), 2, 4), 3, opts);
  EXPECT_EQ(static_cast<int>(F.surviving_leaf_indices({}).size()), F.trees());
  Rng rng(1);
  for (int q = 0; q < 100; ++q) {
    FailureSet fs({static_cast<EdgeId>(rng.below(g.m())), static_cast<EdgeId>(rng.below(g.m()))});
    for (auto l : F.surviving_leaf_indices(fs)) {
      const auto& parent = F.node(l.tree, P.h - 1, l.index / P.K);
      const auto& leaf = F.node(l.tree, P.h, l.index);
      for (EdgeId e : fs.edges) {
        bool in_parent = std::binary_search(parent.S.begin(), parent.S.end(), e);
        if (in_parent) EXPECT_TRUE(std::binary_search(leaf.A_full.begin(), leaf.A_full.end(), e));
      }
      auto mask = F.leaf_host_mask(l);
      for (EdgeId e : fs.edges) EXPECT_TRUE(mask[e]);
    }
  }
  std::vector<EdgeId> every(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) every[e] = e;
  EXPECT_EQ(F.query_short(0, 1, FailureSet(every)), kInf);
}

TEST(Forest, SoundAndMostlyWithinStretch) {
  Graph g = largest_component(make_er(100, 0.08, 12));
  const int L = 6;
  auto P = derive_params(g.n(), L, 1, 2, 1.0);
  auto F = build_forest(g, P, sample_hierarchy(g.n(), 2, 4), 77);
  APSPTable apsp(g);
  Rng rng(13);
  int finite = 0, over = 0;
  for (int q = 0; q < 500; ++q) {
    Vertex s = static_cast<Vertex>(rng.below(g.n())), t = static_cast<Vertex>(rng.below(g.n()));
    FailureSet fs = sample_failures(rng, g, apsp, s, t, 1);
    Dist ans = F.query_short(s, t, fs);
    Dist exact = exact_replacement(g, s, t, fs);
    Dist sh = exact_short(g, s, t, fs, L);
    ASSERT_GE(ans, exact) << s << " " << t;
    if (sh < kInf) {
      ++finite;
      if (ans > 3 * sh) ++over;
    }
  }
  EXPECT_GT(finite, 300);
  EXPECT_LE(over, finite / 100);
}

TEST(Forest, LazyMatchesEagerAndSerializes) {
  Graph g = largest_component(make_er(40, 0.12, 2));
  auto P = derive_params(g.n(), 4, 2, 2, 0.01);
  auto hier = sample_hierarchy(g.n(), 2, 6);
  auto eager = build_forest(g, P, hier, 8);
  ForestOptions lz;
  lz.lazy_leaves = true;
  auto lazy = build_forest(g, P, hier, 8, lz);
  EXPECT_EQ(eager.stats().oracle_words, lazy.stats().oracle_words);
  Rng rng(4);
  for (int q = 0; q < 200; ++q) {
    Vertex s = static_cast<Vertex>(rng.below(g.n())), t = static_cast<Vertex>(rng.below(g.n()));
    FailureSet fs({static_cast<EdgeId>(rng.below(g.m()))});
    EXPECT_EQ(eager.query_short(s, t, fs), lazy.query_short(s, t, fs));
  }
  std::vector<std::uint8_t> a, b;
  eager.serialize(a);
  const std::uint8_t* p = a.data();
  auto back = SamplingForest::deserialize(g, p, a.data() + a.size());
  EXPECT_EQ(p, a.data() + a.size());
  back.serialize(b);
  EXPECT_EQ(a, b);
  for (int q = 0; q < 50; ++q) {
    Vertex s = static_cast<Vertex>(rng.below(g.n())), t = static_cast<Vertex>(rng.below(g.n()));
    FailureSet fs({static_cast<EdgeId>(rng.below(g.m()))});
    EXPECT_EQ(eager.query_short(s, t, fs), back.query_short(s, t, fs));
  }
}

TEST(Forest, ThreadCountDoesNotChangeResult) {
  Graph g = largest_component(make_er(40, 0.12, 2));
  auto P = derive_params(g.n(), 4, 2, 2, 0.01);
  auto hier = sample_hierarchy(g.n(), 2, 6);
  ForestOptions one, three;
  three.threads = 3;
  std::vector<std::uint8_t> a, b;
  build_forest(g, P, hier, 8, one).serialize(a);
  build_forest(g, P, hier, 8, three).serialize(b);
  EXPECT_EQ(a, b);
}

TEST(Forest, BudgetGuard) {
  Graph g = largest_component(make_er(60, 0.1, 2));
  auto P = derive_params(g.n(), 16, 2, 2, 1.0);
  ForestOptions o;
  o.entry_budget = 1000;
  EXPECT_THROW(build_forest(g, P, sample_hierarchy(g.n(), 2, 1), 1, o), BudgetExceeded);
}
