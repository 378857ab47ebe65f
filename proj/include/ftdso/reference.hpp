#pragma once

// Slow ground-truth oracles used by tests, verification campaigns and the
// acceptance runner. Nothing here is used by the oracle itself.

#include <cstdint>
#include <vector>

#include "ftdso/budget.hpp"
#include "ftdso/forest.hpp"
#include "ftdso/graph.hpp"
#include "ftdso/shortest_paths.hpp"

namespace ftdso {

Dist exact_replacement(const Graph& g, Vertex s, Vertex t, const FailureSet& F);
Dist exact_short(const Graph& g, Vertex s, Vertex t, const FailureSet& F, int L);

// levels[a][j]: fewest extra shortest paths needed to write p[a..j] as a
// decomposable path (0 = canonical shortest path of G); kInfLevels if none.
inline constexpr int kInfLevels = 1 << 20;
std::vector<std::vector<int>> decomposition_levels(const APSPTable& apsp, const std::vector<Vertex>& p);

// Exhaustive minimum over simple paths in G - A. Throws BudgetExceeded once
// more than `budget` search nodes are expanded.
std::vector<Dist> brute_decomposable_sssp(const Graph& g, const APSPTable& apsp, const EdgeMask* A, Vertex s,
                                          int ell, std::int64_t budget = 50'000'000);
Dist brute_shortest_expath(const Graph& g, const APSPTable& apsp, const EdgeMask* A, Vertex s, Vertex t, int ell,
                           int lambda, std::int64_t budget = 50'000'000);
// True iff the simple path p admits an ell-expath certificate with granularity lambda.
bool is_expath_certificate(const Graph& g, const APSPTable& apsp, const std::vector<Vertex>& p, int ell,
                           int lambda);

struct TrapezoidResult {
  std::vector<Vertex> members;  // sorted
  bool exists = false;          // P survives in G - F
  bool far_away = false;
};
TrapezoidResult trapezoid(const Graph& g, const FailureSet& F, const std::vector<Vertex>& P, double eps);

// Shortest ell-decomposable u-v path in G - F that is far away from F.
Dist brute_faraway_decomposable(const Graph& g, const APSPTable& apsp, Vertex u, Vertex v, const FailureSet& F,
                                int ell, double eps, std::int64_t budget = 50'000'000);

// Well-behavedness of forest nodes for one query. P is the witness path of
// the TZ oracle of G - F built with the forest's hierarchy.
//   (1) F cap E(S_y) is contained in A_x
//   (2) x is a root, or |E(P) cap A_x| < K^((h-r)/f)
//   (3) E(P) is contained in S_x
struct WellBehavedDepth {
  std::int64_t nodes = 0;
  std::int64_t prop1 = 0, prop2 = 0, prop3 = 0;
  std::int64_t well_behaved = 0;
};
struct WellBehavedAudit {
  std::vector<WellBehavedDepth> depth;  // 0..h
  // Conditional frequencies over parent/child pairs:
  std::int64_t p1_parents = 0, p1_parents_with_child = 0;  // y has (1): some child has (1)
  std::int64_t p2_children = 0, p2_children_ok = 0;        // y has (2): child has (2)
  std::int64_t wb_children = 0, wb_children_ok = 0;        // y well-behaved, x has (1),(2): x well-behaved
  double root_frequency() const {
    return depth.empty() || depth[0].nodes == 0 ? 0.0
                                                : static_cast<double>(depth[0].well_behaved) / depth[0].nodes;
  }
};
// Needs an instrumented forest. Leaf spanners are recomputed.
WellBehavedAudit audit_well_behaved(const SamplingForest& forest, const Graph& g, const FailureSet& F,
                                    const std::vector<Vertex>& P);
// The witness path P_{s,t,G-F}; empty if s and t are disconnected in G - F.
std::vector<Vertex> spanner_witness(const Graph& g, const LevelHierarchy& hier, Vertex s, Vertex t,
                                    const FailureSet& F);

}  // namespace ftdso
