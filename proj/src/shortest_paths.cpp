#include "ftdso/shortest_paths.hpp"

#include <bit>

namespace ftdso {

std::vector<Vertex> SsspResult::path_to(Vertex v) const {
  std::vector<Vertex> out;
  if (dist[v] >= kInf) return out;
  for (Vertex x = v; x != kNoVertex; x = parent[x]) out.push_back(x);
  std::reverse(out.begin(), out.end());
  return out;
}

void CanonicalSearch::resize(int n) {
  n_ = n;
  words_ = (n + 63) / 64;
  dist_.assign(n, kInf);
  parent_.assign(n, kNoVertex);
  pedge_.assign(n, kNoEdge);
  origin_.assign(n, kNoVertex);
  done_.assign(n, 0);
  bits_.assign(static_cast<std::size_t>(n) * words_, 0);
  touched_.clear();
  order_.clear();
}

void CanonicalSearch::reset() {
  for (Vertex v : touched_) {
    dist_[v] = kInf;
    parent_[v] = kNoVertex;
    pedge_[v] = kNoEdge;
    origin_[v] = kNoVertex;
    done_[v] = 0;
  }
  touched_.clear();
  order_.clear();
  fifo_.clear();
  heap_.clear();
}

void CanonicalSearch::settle(Vertex u) {
  done_[u] = 1;
  order_.push_back(u);
  std::uint64_t* pu = &bits_[static_cast<std::size_t>(u) * words_];
  if (parent_[u] == kNoVertex) {
    std::fill(pu, pu + words_, 0);
  } else {
    const std::uint64_t* pp = &bits_[static_cast<std::size_t>(parent_[u]) * words_];
    std::copy(pp, pp + words_, pu);
  }
  pu[u >> 6] |= std::uint64_t{1} << (u & 63);
}

SsspResult CanonicalSearch::export_result() const {
  return SsspResult{dist_, parent_, pedge_};
}

SsspResult canonical_dijkstra(const Graph& g, Vertex source, const EdgeMask* removed, std::optional<int> hop_cap) {
  if (hop_cap) {
    HopBoundedResult h = hop_bounded_sssp(g, source, *hop_cap, removed, true);
    SsspResult r;
    r.dist = h.dist;
    r.parent.assign(g.n(), kNoVertex);
    r.parent_edge.assign(g.n(), kNoEdge);
    // parent of v on its best capped path; the path itself is recovered via
    // the layered parents, so this is informational only.
    for (Vertex v = 0; v < g.n(); ++v) {
      auto p = h.path_to(v);
      if (p.size() >= 2) {
        r.parent[v] = p[p.size() - 2];
        r.parent_edge[v] = *g.find_edge(p[p.size() - 2], v);
      }
    }
    return r;
  }
  CanonicalSearch cs(g.n());
  Vertex src[1] = {source};
  if (removed) cs.run(g, src, [&](EdgeId e) { return (*removed)[e] == 0; });
  else cs.run(g, src, [](EdgeId) { return true; });
  return cs.export_result();
}

HopBoundedResult hop_bounded_sssp(const Graph& g, Vertex source, int hop_cap, const EdgeMask* removed,
                                  bool keep_layers) {
  HopBoundedResult r;
  r.cap = hop_cap;
  std::vector<Dist> cur(g.n(), kInf), nxt;
  std::vector<Vertex> par(g.n(), kNoVertex), npar;
  cur[source] = 0;
  if (keep_layers) {
    r.layer_dist.push_back(cur);
    r.layer_parent.push_back(par);
  }
  std::vector<std::uint8_t> improved(g.n(), 0);
  for (int round = 1; round <= hop_cap; ++round) {
    nxt = cur;
    npar = par;
    std::fill(improved.begin(), improved.end(), 0);
    bool changed = false;
    for (EdgeId id = 0; id < g.m(); ++id) {
      if (removed && (*removed)[id]) continue;
      const Edge& e = g.edge(id);
      for (int side = 0; side < 2; ++side) {
        Vertex a = side ? e.v : e.u, b = side ? e.u : e.v;
        if (cur[a] >= kInf) continue;
        Dist nd = cur[a] + e.w;
        if (nd < nxt[b]) {
          nxt[b] = nd;
          npar[b] = a;
          improved[b] = 1;
          changed = true;
        } else if (nd == nxt[b] && improved[b] && a < npar[b]) {
          npar[b] = a;
        }
      }
    }
    cur.swap(nxt);
    par.swap(npar);
    if (keep_layers) {
      r.layer_dist.push_back(cur);
      r.layer_parent.push_back(par);
    }
    if (!changed && !keep_layers) break;
  }
  r.dist = cur;
  return r;
}

std::vector<Vertex> HopBoundedResult::path_to(Vertex v) const {
  std::vector<Vertex> out;
  if (dist[v] >= kInf || layer_dist.empty()) return out;
  int r = static_cast<int>(layer_dist.size()) - 1;
  Vertex x = v;
  out.push_back(x);
  while (layer_dist[r][x] != 0) {
    // walk back to the first layer where x reached its current value
    while (r > 0 && layer_dist[r - 1][x] == layer_dist[r][x]) --r;
    Vertex p = layer_parent[r][x];
    out.push_back(p);
    x = p;
    --r;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Dist> hop_bounded_dist(const Graph& g, Vertex source, int hop_cap, const EdgeMask* removed) {
  std::vector<Dist> cur(g.n(), kInf), nxt;
  cur[source] = 0;
  std::vector<Vertex> frontier{source}, next_frontier;
  std::vector<std::uint8_t> in_next(g.n(), 0);
  for (int round = 1; round <= hop_cap && !frontier.empty(); ++round) {
    nxt = cur;
    next_frontier.clear();
    for (Vertex a : frontier) {
      for (const Arc& arc : g.neighbors(a)) {
        if (removed && (*removed)[arc.id]) continue;
        Dist nd = cur[a] + arc.w;
        if (nd < nxt[arc.to]) {
          nxt[arc.to] = nd;
          if (!in_next[arc.to]) {
            in_next[arc.to] = 1;
            next_frontier.push_back(arc.to);
          }
        }
      }
    }
    for (Vertex v : next_frontier) in_next[v] = 0;
    cur.swap(nxt);
    frontier.swap(next_frontier);
  }
  return cur;
}

APSPTable::APSPTable(const Graph& g) : n_(g.n()) {
  std::size_t nn = static_cast<std::size_t>(n_) * n_;
  dist_.assign(nn, kInf);
  pred_.assign(nn, kNoVertex);
  hops_.assign(nn, -1);
  CanonicalSearch cs(n_);
  for (Vertex x = 0; x < n_; ++x) {
    Vertex src[1] = {x};
    cs.run(g, src, [](EdgeId) { return true; });
    for (Vertex y : cs.settle_order()) {
      dist_[idx(x, y)] = cs.dist(y);
      pred_[idx(x, y)] = cs.parent(y);
      hops_[idx(x, y)] = y == x ? 0 : hops_[idx(x, cs.parent(y))] + 1;
    }
  }
}

std::vector<Vertex> APSPTable::path(Vertex x, Vertex y) const {
  std::vector<Vertex> out;
  if (dist(x, y) >= kInf) return out;
  for (Vertex v = y; v != kNoVertex; v = pred(x, v)) out.push_back(v);
  std::reverse(out.begin(), out.end());
  return out;
}

SPTreeWithLCA::SPTreeWithLCA(const Graph& g, Vertex root) : root_(root) {
  const int n = g.n();
  CanonicalSearch cs(n);
  Vertex src[1] = {root};
  cs.run(g, src, [](EdgeId) { return true; });
  parent_.assign(n, kNoVertex);
  pedge_.assign(n, kNoEdge);
  depth_.assign(n, -1);
  dist_.assign(n, kInf);
  tin_.assign(n, -1);
  tout_.assign(n, -1);
  first_.assign(n, -1);
  std::vector<std::vector<Vertex>> children(n);
  for (Vertex v : cs.settle_order()) {
    parent_[v] = cs.parent(v);
    pedge_[v] = cs.parent_edge(v);
    dist_[v] = cs.dist(v);
    depth_[v] = parent_[v] == kNoVertex ? 0 : depth_[parent_[v]] + 1;
    if (parent_[v] != kNoVertex) children[parent_[v]].push_back(v);
  }
  // iterative Euler tour
  int timer = 0;
  std::vector<std::pair<Vertex, std::size_t>> stack{{root, 0}};
  tin_[root] = timer++;
  first_[root] = 0;
  euler_.push_back(root);
  while (!stack.empty()) {
    auto& [v, i] = stack.back();
    if (i < children[v].size()) {
      Vertex c = children[v][i++];
      tin_[c] = timer++;
      first_[c] = static_cast<int>(euler_.size());
      euler_.push_back(c);
      stack.emplace_back(c, 0);
    } else {
      tout_[v] = timer++;
      stack.pop_back();
      if (!stack.empty()) euler_.push_back(stack.back().first);
    }
  }
  const int len = static_cast<int>(euler_.size());
  int levels = std::bit_width(static_cast<unsigned>(len));
  sparse_.assign(levels, std::vector<int>(len));
  for (int i = 0; i < len; ++i) sparse_[0][i] = i;
  for (int j = 1; j < levels; ++j) {
    for (int i = 0; i + (1 << j) <= len; ++i) {
      int a = sparse_[j - 1][i], b = sparse_[j - 1][i + (1 << (j - 1))];
      sparse_[j][i] = depth_[euler_[a]] <= depth_[euler_[b]] ? a : b;
    }
  }
}

Vertex SPTreeWithLCA::lca(Vertex u, Vertex v) const {
  if (!contains(u) || !contains(v)) return kNoVertex;
  int a = first_[u], b = first_[v];
  if (a > b) std::swap(a, b);
  int j = std::bit_width(static_cast<unsigned>(b - a + 1)) - 1;
  int x = sparse_[j][a], y = sparse_[j][b - (1 << j) + 1];
  return depth_[euler_[x]] <= depth_[euler_[y]] ? euler_[x] : euler_[y];
}

std::size_t SPTreeWithLCA::words() const {
  std::size_t w = parent_.size() * 7 + euler_.size();
  for (const auto& row : sparse_) w += row.size();
  return w;
}

SPTreeWithLCA build_sp_tree_lca(const Graph& g, Vertex root) { return SPTreeWithLCA(g, root); }

bool edge_on_canonical_path(const SPTreeWithLCA& t, const Graph& g, Vertex v, Vertex w, EdgeId e) {
  const Edge& ed = g.edge(e);
  Vertex child;
  if (t.contains(ed.u) && t.parent_edge(ed.u) == e) child = ed.u;
  else if (t.contains(ed.v) && t.parent_edge(ed.v) == e) child = ed.v;
  else return false;
  return t.is_ancestor(child, v) != t.is_ancestor(child, w);
}

}  // namespace ftdso
