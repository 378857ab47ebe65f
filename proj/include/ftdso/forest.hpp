#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ftdso/budget.hpp"
#include "ftdso/graph.hpp"
#include "ftdso/tz_oracle.hpp"

namespace ftdso {

struct ForestParams {
  int n = 0;
  int L = 2;
  int f = 1;
  int k = 2;
  double C = 1.0;
  int h = 1;
  std::int64_t K = 2;
  double p = 0.5;
  int I = 1;
  std::vector<std::int64_t> J;  // J[r] for r = 0..h
};

// h = round(sqrt(f ln L)) >= 1, K = ceil(((2k-1) L)^(f/h)), p = K^(-1/f),
// I = ceil(C 11^h ln n), J_r = 4 K^(h-r), J_h = 1. Throws std::invalid_argument.
ForestParams derive_params(int n, int L, int f, int k, double C);

struct ForestOptions {
  unsigned threads = 1;
  bool lazy_leaves = false;  // rebuild leaf oracles on demand from the stored dictionaries
  bool instrument = false;   // keep every A_x for auditing
  std::uint64_t entry_budget = 400'000'000;
  std::optional<int> trees;  // overrides I
};

struct LeafHandle {
  int tree = 0;
  std::int64_t index = 0;  // position of the leaf among the K^h leaves
  bool operator==(const LeafHandle&) const = default;
};

struct ForestStats {
  std::int64_t trees = 0;
  std::int64_t nodes = 0;
  std::int64_t leaves = 0;
  std::int64_t s_entries = 0;       // sum of |E(S_x)| over internal nodes
  std::int64_t a_entries = 0;       // sum of |A_x cap E(S_y)| over non-root nodes
  std::int64_t oracle_words = 0;    // leaf oracles, counted whether stored or lazy
  std::int64_t projected_entries = 0;
  double build_seconds = 0;
  std::int64_t words() const { return s_entries + a_entries + oracle_words; }
};

class SamplingForest {
 public:
  struct Node {
    std::vector<EdgeId> S;       // E(S_x), internal nodes only
    std::vector<EdgeId> A;       // A_x cap E(S_y), non-root nodes
    std::vector<EdgeId> A_full;  // instrumented builds only
  };
  struct Tree {
    std::vector<Node> nodes;  // level order; node (r, q) sits at offset(r) + q
    std::vector<TZOracle> leaves;
  };

  const ForestParams& params() const { return params_; }
  const LevelHierarchy& hierarchy() const { return hier_; }
  const Graph& graph() const { return *g_; }
  int trees() const { return static_cast<int>(trees_.size()); }
  bool lazy() const { return lazy_; }
  bool instrumented() const { return instrumented_; }
  const ForestStats& stats() const { return stats_; }

  std::int64_t offset(int depth) const { return offsets_[depth]; }
  const Node& node(int tree, int depth, std::int64_t q) const { return trees_[tree].nodes[offsets_[depth] + q]; }

  // Root-to-leaf descent without touching the oracles.
  std::vector<LeafHandle> surviving_leaf_indices(const FailureSet& F) const;
  Dist query_short(Vertex s, Vertex t, const FailureSet& F) const;
  Dist query_leaves(const std::vector<LeafHandle>& leaves, Vertex s, Vertex t) const;

  // Removed-edge mask of the leaf graph S_y - A_x.
  EdgeMask leaf_host_mask(LeafHandle l) const;
  std::shared_ptr<const TZOracle> leaf_oracle(LeafHandle l) const;

  void serialize(std::vector<std::uint8_t>& out) const;
  static SamplingForest deserialize(const Graph& g, const std::uint8_t*& p, const std::uint8_t* end);

 private:
  friend SamplingForest build_forest(const Graph&, const ForestParams&, const LevelHierarchy&, std::uint64_t,
                                     const ForestOptions&);
  void init_offsets();

  const Graph* g_ = nullptr;
  ForestParams params_;
  LevelHierarchy hier_;
  bool lazy_ = false;
  bool instrumented_ = false;
  std::vector<std::int64_t> offsets_;
  std::vector<Tree> trees_;
  ForestStats stats_;

  struct Cache {
    std::mutex mu;
    std::unordered_map<std::uint64_t, std::shared_ptr<const TZOracle>> map;
  };
  std::unique_ptr<Cache> cache_ = std::make_unique<Cache>();
};

SamplingForest build_forest(const Graph& g, const ForestParams& params, const LevelHierarchy& hier,
                            std::uint64_t seed, const ForestOptions& opts = {});

}  // namespace ftdso
