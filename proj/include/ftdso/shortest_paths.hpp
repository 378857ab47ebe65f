#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ftdso/graph.hpp"

namespace ftdso {

struct SsspResult {
  std::vector<Dist> dist;
  std::vector<Vertex> parent;
  std::vector<EdgeId> parent_edge;

  // Vertices from the source to v; empty if v is unreachable.
  std::vector<Vertex> path_to(Vertex v) const;
};

// Dijkstra (or BFS on unit weights) whose parent choice is canonical: among
// equal-length paths the one whose vertex set wins the set order is kept.
// Set order: A before B iff the smallest vertex of the symmetric difference
// lies in A. The order is symmetric in the endpoints and closed under
// subpaths, so P(u,v) is exactly the reverse of P(v,u).
//
// With several sources the key is (distance, source id, set), so each vertex
// is attached to its nearest source with ties going to the smaller id.
class CanonicalSearch {
 public:
  explicit CanonicalSearch(int n = 0) { resize(n); }

  void resize(int n);
  int n() const { return n_; }

  // allow(EdgeId) -> bool filters edges; admit(Vertex, Dist) -> bool decides
  // whether a tentative distance may be assigned (truncated searches).
  template <class Allow, class Admit>
  void run(const Graph& g, std::span<const Vertex> sources, Allow&& allow, Admit&& admit);

  template <class Allow>
  void run(const Graph& g, std::span<const Vertex> sources, Allow&& allow) {
    run(g, sources, allow, [](Vertex, Dist) { return true; });
  }

  Dist dist(Vertex v) const { return dist_[v]; }
  Vertex parent(Vertex v) const { return parent_[v]; }
  EdgeId parent_edge(Vertex v) const { return pedge_[v]; }
  Vertex origin(Vertex v) const { return origin_[v]; }
  bool settled(Vertex v) const { return done_[v] != 0; }
  std::span<const Vertex> settle_order() const { return order_; }

  SsspResult export_result() const;

 private:
  bool set_less(Vertex a, Vertex b) const {
    const std::uint64_t* pa = &bits_[static_cast<std::size_t>(a) * words_];
    const std::uint64_t* pb = &bits_[static_cast<std::size_t>(b) * words_];
    for (int i = 0; i < words_; ++i) {
      std::uint64_t x = pa[i] ^ pb[i];
      if (x) return (pa[i] & (x & (~x + 1))) != 0;
    }
    return false;
  }
  void settle(Vertex u);
  void reset();

  int n_ = 0;
  int words_ = 0;
  std::vector<Dist> dist_;
  std::vector<Vertex> parent_;
  std::vector<EdgeId> pedge_;
  std::vector<Vertex> origin_;
  std::vector<std::uint8_t> done_;
  std::vector<std::uint64_t> bits_;
  std::vector<Vertex> touched_;
  std::vector<Vertex> order_;
  std::vector<Vertex> fifo_;
  std::vector<std::pair<Dist, Vertex>> heap_;
};

template <class Allow, class Admit>
void CanonicalSearch::run(const Graph& g, std::span<const Vertex> sources, Allow&& allow, Admit&& admit) {
  if (g.n() != n_) resize(g.n());
  reset();
  const bool bfs = g.unweighted();
  auto touch = [&](Vertex v) {
    if (dist_[v] == kInf && origin_[v] == kNoVertex) touched_.push_back(v);
  };
  for (Vertex s : sources) {
    if (origin_[s] != kNoVertex) continue;
    touch(s);
    dist_[s] = 0;
    origin_[s] = s;
    if (bfs) fifo_.push_back(s);
    else heap_.emplace_back(0, s);
  }
  if (!bfs) std::make_heap(heap_.begin(), heap_.end(), std::greater<>());
  // Multi-source runs need sources settled in id order for the origin key.
  if (bfs) std::sort(fifo_.begin(), fifo_.end());

  auto relax = [&](Vertex u) {
    const Dist du = dist_[u];
    for (const Arc& a : g.neighbors(u)) {
      if (done_[a.to] || !allow(a.id)) continue;
      const Vertex v = a.to;
      const Dist nd = du + a.w;
      if (nd > dist_[v]) continue;
      if (!admit(v, nd)) continue;
      bool better;
      if (nd < dist_[v]) better = true;
      else if (origin_[u] != origin_[v]) better = origin_[u] < origin_[v];
      else better = set_less(u, parent_[v]);
      if (!better) continue;
      const bool push = nd < dist_[v];
      touch(v);
      dist_[v] = nd;
      parent_[v] = u;
      pedge_[v] = a.id;
      origin_[v] = origin_[u];
      if (push) {
        if (bfs) {
          fifo_.push_back(v);
        } else {
          heap_.emplace_back(nd, v);
          std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
        }
      }
    }
  };

  if (bfs) {
    for (std::size_t head = 0; head < fifo_.size(); ++head) {
      Vertex u = fifo_[head];
      if (done_[u]) continue;
      settle(u);
      relax(u);
    }
  } else {
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
      auto [d, u] = heap_.back();
      heap_.pop_back();
      if (done_[u] || d != dist_[u]) continue;
      settle(u);
      relax(u);
    }
  }
}

// Convenience wrapper: single-source canonical shortest paths in g minus the
// removed edges. With hop_cap set, dist follows the d^{<=L} semantics and is
// computed by layered relaxation instead.
SsspResult canonical_dijkstra(const Graph& g, Vertex source, const EdgeMask* removed = nullptr,
                              std::optional<int> hop_cap = std::nullopt);

struct HopBoundedResult {
  int cap = 0;
  std::vector<Dist> dist;  // min length over paths with at most cap edges
  // layer_parent[r][v]: predecessor of v on a best path using at most r edges
  std::vector<std::vector<Vertex>> layer_parent;
  std::vector<std::vector<Dist>> layer_dist;
  std::vector<Vertex> path_to(Vertex v) const;
};

HopBoundedResult hop_bounded_sssp(const Graph& g, Vertex source, int hop_cap, const EdgeMask* removed = nullptr,
                                  bool keep_layers = false);

// d^{<=cap} from source to every vertex; distance-only fast path.
std::vector<Dist> hop_bounded_dist(const Graph& g, Vertex source, int hop_cap, const EdgeMask* removed = nullptr);

class APSPTable {
 public:
  APSPTable() = default;
  explicit APSPTable(const Graph& g);

  int n() const { return n_; }
  Dist dist(Vertex x, Vertex y) const { return dist_[idx(x, y)]; }
  // predecessor of y on the canonical x-y path (kNoVertex if y==x or unreachable)
  Vertex pred(Vertex x, Vertex y) const { return pred_[idx(x, y)]; }
  std::vector<Vertex> path(Vertex x, Vertex y) const;
  // hop count of the canonical x-y path
  int hops(Vertex x, Vertex y) const { return hops_[idx(x, y)]; }
  std::size_t words() const { return dist_.size() * 2 + hops_.size() / 2; }

 private:
  std::size_t idx(Vertex x, Vertex y) const { return static_cast<std::size_t>(x) * n_ + y; }
  int n_ = 0;
  std::vector<Dist> dist_;
  std::vector<Vertex> pred_;
  std::vector<std::int32_t> hops_;
};

class SPTreeWithLCA {
 public:
  SPTreeWithLCA() = default;
  SPTreeWithLCA(const Graph& g, Vertex root);

  Vertex root() const { return root_; }
  bool contains(Vertex v) const { return tin_[v] >= 0; }
  Vertex parent(Vertex v) const { return parent_[v]; }
  EdgeId parent_edge(Vertex v) const { return pedge_[v]; }
  int depth(Vertex v) const { return depth_[v]; }
  Dist dist(Vertex v) const { return dist_[v]; }
  Vertex lca(Vertex u, Vertex v) const;
  bool is_ancestor(Vertex a, Vertex x) const {
    return contains(a) && contains(x) && tin_[a] <= tin_[x] && tout_[x] <= tout_[a];
  }
  std::size_t words() const;

 private:
  Vertex root_ = kNoVertex;
  std::vector<Vertex> parent_;
  std::vector<EdgeId> pedge_;
  std::vector<int> depth_;
  std::vector<Dist> dist_;
  std::vector<int> tin_, tout_, first_;
  std::vector<Vertex> euler_;
  std::vector<std::vector<int>> sparse_;  // indices into euler_ with minimum depth
};

SPTreeWithLCA build_sp_tree_lca(const Graph& g, Vertex root);

// True iff edge e lies on the v-w path of tree t. When the root lies between v
// and w this path is the canonical v-root path followed by the canonical
// root-w path, which is how pivot parts are tested.
bool edge_on_canonical_path(const SPTreeWithLCA& t, const Graph& g, Vertex v, Vertex w, EdgeId e);

}  // namespace ftdso
