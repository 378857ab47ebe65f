#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ftdso/graph.hpp"
#include "ftdso/shortest_paths.hpp"

namespace ftdso {

// X_0 = V and each X_i keeps every vertex of X_{i-1} with probability n^{-1/k}.
struct LevelHierarchy {
  int n = 0;
  int k = 1;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> top;  // v is in X_i iff i <= top[v]

  bool in(int i, Vertex v) const { return i < k && top[v] >= i; }
  std::vector<Vertex> level(int i) const;
};

LevelHierarchy sample_hierarchy(int n, int k, std::uint64_t seed);

struct BunchEntry {
  std::uint32_t packed;  // vertex id in the low 24 bits, level bitmask above
  std::int32_t d;
  Vertex x() const { return static_cast<Vertex>(packed & 0xffffffu); }
  std::uint8_t levels() const { return static_cast<std::uint8_t>(packed >> 24); }
};

// Distance oracle of one host subgraph H. Bunches of all levels are merged
// per vertex into one array sorted by vertex id.
class TZOracle {
 public:
  int n() const { return n_; }
  int k() const { return k_; }

  // p_i(v) and d_H(v, X_i); kNoVertex / kInf if X_i is unreachable
  Vertex pivot(int i, Vertex v) const { return pivot_[idx(i, v)]; }
  Dist pivot_dist(int i, Vertex v) const;

  std::span<const BunchEntry> bunch(Vertex v) const {
    return {entries_.data() + offsets_[v], entries_.data() + offsets_[v + 1]};
  }
  // d_H(v, x) if x lies in the union of v's bunches
  std::optional<Dist> bunch_dist(Vertex v, Vertex x) const;
  bool in_bunch(int i, Vertex v, Vertex x) const;

  struct Answer {
    Dist value = kInf;
    Vertex interconnect = kNoVertex;
  };
  Answer query(Vertex s, Vertex t) const;
  Dist query_modified(Vertex s, Vertex t) const { return query(s, t).value; }

  std::size_t entries() const { return entries_.size(); }
  std::size_t words() const { return entries_.size() * 2 + offsets_.size() + pivot_.size() * 2; }

  void serialize(std::vector<std::uint8_t>& out) const;
  static TZOracle deserialize(const std::uint8_t*& p, const std::uint8_t* end);

 private:
  friend class TZBuilder;
  std::size_t idx(int i, Vertex v) const { return static_cast<std::size_t>(v) * k_ + i; }
  int n_ = 0;
  int k_ = 1;
  std::vector<Vertex> pivot_;
  std::vector<std::int32_t> pivot_dist_;
  std::vector<std::uint32_t> offsets_;
  std::vector<BunchEntry> entries_;
};

// Reusable workspace for building oracles and spanners of many subgraphs of
// one base graph under one fixed hierarchy.
class TZBuilder {
 public:
  TZBuilder(const Graph& g, const LevelHierarchy& hier);

  // Host graph = base graph minus edges with removed[e] != 0 (nullptr: none).
  // When spanner_marks is given, spanner edges are OR-ed into it.
  TZOracle build(const EdgeMask* removed, EdgeMask* spanner_marks = nullptr);
  void mark_spanner(const EdgeMask* removed, EdgeMask& spanner_marks);

 private:
  void run(const EdgeMask* removed, TZOracle* out, EdgeMask* marks);

  const Graph& g_;
  const LevelHierarchy& hier_;
  CanonicalSearch cs_;
  std::vector<std::vector<Vertex>> levels_;
  std::vector<std::vector<Vertex>> strata_;  // X_i \ X_{i+1}
  std::vector<Dist> dnext_;
  std::vector<std::vector<BunchEntry>> scratch_;
};

struct TZBuildResult {
  TZOracle oracle;
  std::vector<EdgeId> spanner;  // sorted edge ids
};

TZBuildResult build_oracle_and_spanner(const Graph& g, const EdgeMask* removed, const LevelHierarchy& hier);

struct Witness {
  Vertex interconnect = kNoVertex;
  std::vector<Vertex> path;
};

// Path underlying query(s,t): canonical s-u path then canonical u-t path of H.
// Throws GraphError if s and t are disconnected in H.
Witness witness(const TZOracle& o, const Graph& g, const EdgeMask* removed, Vertex s, Vertex t);

}  // namespace ftdso
