#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ftdso {

using Vertex = std::int32_t;
using EdgeId = std::int32_t;
using Dist = std::int64_t;

inline constexpr Dist kInf = std::numeric_limits<Dist>::max() / 4;
inline constexpr Vertex kNoVertex = -1;
inline constexpr EdgeId kNoEdge = -1;

inline Dist add_sat(Dist a, Dist b) {
  if (a >= kInf || b >= kInf) return kInf;
  Dist s = a + b;
  return s >= kInf ? kInf : s;
}

inline Dist mul_sat(Dist a, Dist c) {
  if (a >= kInf) return kInf;
  if (c != 0 && a > kInf / c) return kInf;
  return a * c;
}

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Arc {
  Vertex to;
  EdgeId id;
  std::int32_t w;
};

struct Edge {
  Vertex u;
  Vertex v;
  std::int32_t w;
  Vertex other(Vertex x) const { return x == u ? v : u; }
};

class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(n) {}

  EdgeId add_edge(Vertex u, Vertex v, std::int32_t w = 1);

  int n() const { return static_cast<int>(adj_.size()); }
  int m() const { return static_cast<int>(edges_.size()); }
  std::int32_t max_weight() const { return max_w_; }
  bool unweighted() const { return max_w_ <= 1; }

  std::span<const Arc> neighbors(Vertex v) const { return adj_[v]; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::optional<EdgeId> find_edge(Vertex u, Vertex v) const;

 private:
  static std::uint64_t key(Vertex u, Vertex v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
  }
  std::vector<std::vector<Arc>> adj_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, EdgeId> index_;
  std::int32_t max_w_ = 1;
};

// removed[e] != 0 means edge e is absent from the subgraph.
using EdgeMask = std::vector<std::uint8_t>;

struct FailureSet {
  std::vector<EdgeId> edges;  // sorted, unique

  FailureSet() = default;
  explicit FailureSet(std::vector<EdgeId> es);
  std::size_t size() const { return edges.size(); }
  bool empty() const { return edges.empty(); }
  bool contains(EdgeId e) const;
  std::vector<Vertex> endpoints(const Graph& g) const;
  EdgeMask mask(const Graph& g) const;
  void validate(const Graph& g, int f) const;
};

Graph parse_dimacs(std::string_view text);
Graph load_dimacs(std::istream& in);
Graph load_dimacs_file(const std::string& path);
void write_dimacs(const Graph& g, std::ostream& out);

}  // namespace ftdso
