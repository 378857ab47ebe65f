#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "ftdso/expath.hpp"
#include "ftdso/graph.hpp"
#include "ftdso/shortest_paths.hpp"

namespace ftdso {

struct PivotSets {
  std::vector<std::uint8_t> in_B;
  std::vector<std::uint8_t> in_new;  // the sparser set of new pivots
  std::vector<Vertex> B;
  std::vector<Vertex> new_pivots;
  double prob_B = 1;
  double prob_new = 1;
};

// B: probability min(1, C'' f log2(n) / lambda_B). New pivots: probability
// min(1, C' f log2(n) / (lambda L^(f-1))), drawn from an independent stream.
PivotSets sample_pivots(int n, int f, double lambda_B, int L, double lambda, double C_prime, double C_second,
                        std::uint64_t seed);

// Netpoint positions (sorted) of a path given its prefix lengths, pre[0] = 0.
std::vector<int> compute_netpoints(const std::vector<Dist>& pre, double eps, int lambda);

struct FTPart {
  Vertex v = kNoVertex;
  Vertex w = kNoVertex;
  std::int32_t d = 0;          // d_G(v, w)
  std::int32_t segment = 0;
  Vertex pivot = kNoVertex;    // long parts only; kNoVertex if none was sampled on it
  std::uint8_t flags = 0;
  static constexpr std::uint8_t kVNet = 1, kWNet = 2, kLong = 4;
  bool is_long() const { return flags & kLong; }
};

struct FTNode {
  Dist length = kInf;  // kInf: u and b disconnected in G - A_nu
  int depth = 0;
  int segments = 0;
  std::vector<FTPart> parts;
  std::vector<std::int32_t> children;  // per segment; -1 until built
  bool empty() const { return length >= kInf; }
  std::size_t words() const { return 3 + parts.size() * 4 + children.size(); }
};

struct FTStats {
  std::atomic<std::int64_t> nodes_built{0};
  std::atomic<std::int64_t> segment_checks{0};
  std::atomic<std::int64_t> segment_violations{0};
  std::atomic<std::int64_t> missing_pivots{0};
  std::atomic<std::int64_t> uncertified_leaves{0};  // leaf reached through a failure that F might not cause
  std::atomic<std::int64_t> queries{0};
  std::atomic<std::int64_t> max_visited{0};
};

// Query-independent data every FT-tree of one oracle shares.
class FTContext {
 public:
  FTContext(const Graph& g, const APSPTable& apsp, const PivotSets& pivots, int f, double eps, int L);

  const Graph& graph() const { return g_; }
  const APSPTable& apsp() const { return apsp_; }
  const PivotSets& pivots() const { return pivots_; }
  int f() const { return f_; }
  double eps() const { return eps_; }
  int L() const { return L_; }
  // SP tree with LCA for a vertex in B or among the new pivots.
  const SPTreeWithLCA& pivot_tree(Vertex p) const;
  std::size_t lca_words() const;
  FTStats& stats() const { return stats_; }

 private:
  const Graph& g_;
  const APSPTable& apsp_;
  const PivotSets& pivots_;
  int f_;
  double eps_;
  int L_;
  std::vector<std::unique_ptr<SPTreeWithLCA>> trees_;
  mutable FTStats stats_;
};

// Estimates d^{<=L}_{G-F}(v, w) for the current query's F.
using ShortOracleFn = std::function<Dist(Vertex, Vertex)>;

struct NodeCheck {
  bool ok = false;
  Dist value = kInf;      // 3 |P_nu| when ok
  int segment = -1;       // failed segment otherwise
  bool certified = false; // the failed part provably contains an edge of F
};

class FTTree {
 public:
  FTTree(const FTContext& ctx, Vertex a, Vertex b, int lambda);

  Vertex a() const { return a_; }
  Vertex b() const { return b_; }
  int lambda() const { return lambda_; }
  const FTNode& root() const { return nodes_.front(); }
  std::size_t node_count() const;
  std::size_t words() const;

  NodeCheck node_check(const FTNode& node, const FailureSet& F, const ShortOracleFn& short_dso) const;
  // Returns FT(a, b, F) (or FT_lambda). Children are built on first use.
  // sampling_failure is set when the descent met a long part without a pivot
  // or ended in a leaf that could not be certified.
  Dist query(const FailureSet& F, const ShortOracleFn& short_dso, int* visited = nullptr,
             bool* sampling_failure = nullptr);
  // Builds every node down to depth f.
  void build_all();

  const FTNode& node(std::int32_t id) const { return nodes_[id]; }

 private:
  FTNode make_node(const EdgeMask& A, int depth);
  void add_segment_edges(const FTNode& node, int segment, EdgeMask& A) const;
  std::int32_t child(std::int32_t id, int segment, const EdgeMask& A_child);

  const FTContext& ctx_;
  Vertex a_, b_;
  int lambda_;
  std::vector<FTNode> nodes_;
  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
};

}  // namespace ftdso
