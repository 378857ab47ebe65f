#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftdso/graph.hpp"
#include "ftdso/shortest_paths.hpp"

namespace ftdso {

struct PathItem {
  enum class Kind : std::uint8_t { Piece, Edge };
  Kind kind;
  Vertex a;
  Vertex b;
};

// One decomposable block: pieces are canonical shortest paths of G, edges are
// single interleaving edges. Trivial pieces are never stored.
struct ExpathBlock {
  int phase = 0;
  std::vector<PathItem> items;
  Dist length = 0;
};

struct ExpathStructure {
  Vertex s = kNoVertex;
  Vertex t = kNoVertex;
  int ell = 0;
  int lambda = 0;
  std::vector<Vertex> prefix;  // starts at s, at most lambda edges
  std::vector<ExpathBlock> blocks;
  std::vector<Vertex> suffix;  // ends at t, at most lambda edges
  Dist length = kInf;

  bool empty() const { return length >= kInf; }
  // Expanded vertex sequence s..t.
  std::vector<Vertex> vertices(const APSPTable& apsp) const;
};

// Levels a block needs: a piece opens a level unless it follows an edge, an
// edge always opens one; a block starting with an edge has an empty first piece.
int block_levels(const ExpathBlock& b);

// Phase count basis: ceil(log2(n W)), at least 1.
int expath_log_range(int n, std::int32_t max_weight);
Dist expath_block_cap(int log_range, int phase);

class ExpathEngine {
 public:
  ExpathEngine(const Graph& g, const APSPTable& apsp);

  // d^{(ell)}(s, v, A) for all v: shortest ell-decomposable paths in G - A.
  std::vector<Dist> decomposable_sssp(const EdgeMask* A, Vertex s, int ell);

  // Shortest ell-expath (with granularity lambda) from s to t in G - A.
  ExpathStructure shortest_expath(const EdgeMask* A, Vertex s, Vertex t, int ell, int lambda);

  int log_range() const { return lg_; }
  const Graph& graph() const { return g_; }
  const APSPTable& apsp() const { return apsp_; }

 private:
  enum class Step : std::uint8_t { None, Star, InLayer, ZeroHop, CrossEdge };
  struct PhaseTrace {
    std::vector<std::int32_t> parent;
    std::vector<Step> step;
  };
  std::vector<Dist> canonical_survivors(const EdgeMask* A, Vertex s) const;

  const Graph& g_;
  const APSPTable& apsp_;
  int lg_;
  std::vector<Dist> lab_, start_;
  std::vector<Vertex> xent_;
  std::vector<std::uint8_t> done_;
  std::vector<std::pair<Dist, std::int32_t>> heap_;
};

// Certificate check of a labelled expath against G, the canonical paths and A.
bool verify_expath(const Graph& g, const APSPTable& apsp, const EdgeMask* A, const ExpathStructure& p, int ell,
                   int lambda, std::string* why = nullptr);

}  // namespace ftdso
