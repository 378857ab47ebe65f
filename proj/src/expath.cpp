#include "ftdso/expath.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ftdso {

int block_levels(const ExpathBlock& b) {
  if (b.items.empty()) return 0;
  int units = 0;
  for (std::size_t i = 0; i < b.items.size(); ++i) {
    const auto& it = b.items[i];
    if (it.kind == PathItem::Kind::Edge) ++units;
    else if (i == 0 || b.items[i - 1].kind != PathItem::Kind::Edge) ++units;
  }
  return units - 1 + (b.items.front().kind == PathItem::Kind::Edge ? 1 : 0);
}

int expath_log_range(int n, std::int32_t max_weight) {
  double nw = static_cast<double>(std::max(n, 1)) * std::max(max_weight, 1);
  int lg = static_cast<int>(std::ceil(std::log2(nw) - 1e-12));
  return std::max(lg, 1);
}

Dist expath_block_cap(int log_range, int phase) {
  int e = std::min(phase, 2 * log_range - phase);
  return e >= 62 ? kInf : (Dist{1} << e);
}

std::vector<Vertex> ExpathStructure::vertices(const APSPTable& apsp) const {
  std::vector<Vertex> out;
  if (empty()) return out;
  out = prefix;
  for (const auto& b : blocks)
    for (const auto& it : b.items) {
      if (it.kind == PathItem::Kind::Edge) {
        out.push_back(it.b);
      } else {
        auto p = apsp.path(it.a, it.b);
        out.insert(out.end(), p.begin() + 1, p.end());
      }
    }
  out.insert(out.end(), suffix.begin() + 1, suffix.end());
  return out;
}

ExpathEngine::ExpathEngine(const Graph& g, const APSPTable& apsp)
    : g_(g), apsp_(apsp), lg_(expath_log_range(g.n(), g.max_weight())) {}

std::vector<Dist> ExpathEngine::canonical_survivors(const EdgeMask* A, Vertex s) const {
  const int n = g_.n();
  std::vector<Dist> D(n, kInf);
  std::vector<std::int8_t> ok(n, -1);
  ok[s] = 1;
  std::vector<Vertex> chain;
  for (Vertex v = 0; v < n; ++v) {
    if (apsp_.dist(s, v) >= kInf) continue;
    chain.clear();
    Vertex x = v;
    while (ok[x] < 0) {
      chain.push_back(x);
      x = apsp_.pred(s, x);
    }
    std::int8_t state = ok[x];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      Vertex y = *it;
      if (state == 1 && A) {
        EdgeId e = *g_.find_edge(apsp_.pred(s, y), y);
        if ((*A)[e]) state = 0;
      }
      ok[y] = state;
    }
    if (ok[v] == 1) D[v] = apsp_.dist(s, v);
  }
  return D;
}

std::vector<Dist> ExpathEngine::decomposable_sssp(const EdgeMask* A, Vertex s, int ell) {
  const int n = g_.n();
  std::vector<Dist> D = canonical_survivors(A, s);
  auto allowed = [A](EdgeId e) { return !A || (*A)[e] == 0; };
  for (int level = 1; level <= ell; ++level) {
    // two copies: ids [0,n) carry the previous level, ids [n,2n) extend it
    lab_.assign(2 * n, kInf);
    xent_.assign(2 * n, kNoVertex);
    done_.assign(2 * n, 0);
    heap_.clear();
    for (Vertex v = 0; v < n; ++v)
      if (D[v] < kInf) {
        lab_[v] = D[v];
        heap_.emplace_back(D[v], v);
      }
    std::make_heap(heap_.begin(), heap_.end(), std::greater<>());
    auto relax = [&](std::int32_t id, Dist d, Vertex x) {
      if (d < lab_[id]) {
        lab_[id] = d;
        xent_[id] = x;
        heap_.emplace_back(d, id);
        std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
      }
    };
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
      auto [d, id] = heap_.back();
      heap_.pop_back();
      if (done_[id] || d != lab_[id]) continue;
      done_[id] = 1;
      if (id < n) {
        Vertex u = id;
        relax(n + u, d, u);
        for (const Arc& a : g_.neighbors(u))
          if (allowed(a.id)) relax(n + a.to, d + a.w, a.to);
      } else {
        Vertex u = id - n, xe = xent_[id];
        for (const Arc& a : g_.neighbors(u))
          if (allowed(a.id) && a.to != xe && apsp_.pred(xe, a.to) == u) relax(n + a.to, d + a.w, xe);
      }
    }
    for (Vertex v = 0; v < n; ++v) D[v] = lab_[n + v];
  }
  return D;
}

ExpathStructure ExpathEngine::shortest_expath(const EdgeMask* A, Vertex s, Vertex t, int ell, int lambda) {
  const int n = g_.n();
  const int layers = ell + 1;
  const int phases = 2 * lg_ + 1;
  ExpathStructure out;
  out.s = s;
  out.t = t;
  out.ell = ell;
  out.lambda = lambda;
  auto allowed = [A](EdgeId e) { return !A || (*A)[e] == 0; };

  if (s == t) {
    out.length = 0;
    out.prefix = {s};
    out.suffix = {t};
    for (int i = 0; i < phases; ++i) out.blocks.push_back(ExpathBlock{i, {}, 0});
    return out;
  }

  HopBoundedResult from_s, to_t;
  std::vector<Dist> Dprev(n, kInf);
  if (lambda > 0) {
    from_s = hop_bounded_sssp(g_, s, lambda, A, true);
    Dprev = from_s.dist;
  } else {
    Dprev[s] = 0;
  }

  const std::size_t N = static_cast<std::size_t>(layers) * n;
  std::vector<PhaseTrace> trace(phases);
  for (int i = 0; i < phases; ++i) {
    const Dist cap = expath_block_cap(lg_, i);
    auto& tr = trace[i];
    tr.parent.assign(N, -1);
    tr.step.assign(N, Step::None);
    lab_.assign(N, kInf);
    start_.assign(N, kInf);
    xent_.assign(N, kNoVertex);
    done_.assign(N, 0);
    heap_.clear();
    for (Vertex v = 0; v < n; ++v)
      if (Dprev[v] < kInf) {
        lab_[v] = start_[v] = Dprev[v];
        xent_[v] = v;
        tr.step[v] = Step::Star;
        heap_.emplace_back(Dprev[v], v);
      }
    std::make_heap(heap_.begin(), heap_.end(), std::greater<>());
    auto relax = [&](std::int32_t from, std::int32_t id, Dist d, Vertex x, Step st) {
      if (d < lab_[id]) {
        lab_[id] = d;
        start_[id] = start_[from];
        xent_[id] = x;
        tr.parent[id] = from;
        tr.step[id] = st;
        heap_.emplace_back(d, id);
        std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
      }
    };
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
      auto [d, id] = heap_.back();
      heap_.pop_back();
      if (done_[id] || d != lab_[id]) continue;
      done_[id] = 1;
      const int j = id / n;
      const Vertex u = id % n, xe = xent_[id];
      const Dist used = d - start_[id];
      for (const Arc& a : g_.neighbors(u)) {
        if (!allowed(a.id) || used + a.w > cap) continue;
        if (a.to != xe && apsp_.pred(xe, a.to) == u) relax(id, j * n + a.to, d + a.w, xe, Step::InLayer);
        if (j + 1 < layers) relax(id, (j + 1) * n + a.to, d + a.w, a.to, Step::CrossEdge);
      }
      if (j + 1 < layers) relax(id, (j + 1) * n + u, d, u, Step::ZeroHop);
    }
    for (Vertex v = 0; v < n; ++v) Dprev[v] = lab_[static_cast<std::size_t>(ell) * n + v];
  }

  Vertex endv = t;
  if (lambda > 0) {
    to_t = hop_bounded_sssp(g_, t, lambda, A, true);
    Dist best = kInf;
    for (Vertex v = 0; v < n; ++v) {
      Dist c = add_sat(Dprev[v], to_t.dist[v]);
      if (c < best) {
        best = c;
        endv = v;
      }
    }
    out.length = best;
  } else {
    out.length = Dprev[t];
  }
  if (out.length >= kInf) {
    out.length = kInf;
    return out;
  }

  out.blocks.resize(phases);
  Vertex v = endv;
  for (int i = phases - 1; i >= 0; --i) {
    const auto& tr = trace[i];
    std::vector<std::int32_t> chain;
    for (std::int32_t id = ell * n + v; id >= 0; id = tr.parent[id]) chain.push_back(id);
    std::reverse(chain.begin(), chain.end());
    ExpathBlock& blk = out.blocks[i];
    blk.phase = i;
    const Vertex w = chain.front() % n;
    Vertex piece_start = w, cur = w;
    auto close_piece = [&]() {
      if (piece_start != cur) blk.items.push_back({PathItem::Kind::Piece, piece_start, cur});
    };
    for (std::size_t c = 1; c < chain.size(); ++c) {
      const Vertex b = chain[c] % n;
      switch (tr.step[chain[c]]) {
        case Step::InLayer:
          cur = b;
          break;
        case Step::ZeroHop:
          close_piece();
          piece_start = cur;
          break;
        case Step::CrossEdge:
          close_piece();
          blk.items.push_back({PathItem::Kind::Edge, cur, b});
          piece_start = cur = b;
          break;
        default:
          break;
      }
    }
    close_piece();
    Dist len = 0;
    for (const auto& it : blk.items) {
      if (it.kind == PathItem::Kind::Piece) len += apsp_.dist(it.a, it.b);
      else len += g_.edge(*g_.find_edge(it.a, it.b)).w;
    }
    blk.length = len;
    v = w;
  }
  if (lambda > 0) {
    out.prefix = from_s.path_to(v);
    auto back = to_t.path_to(endv);  // t .. endv
    out.suffix.assign(back.rbegin(), back.rend());
  } else {
    out.prefix = {s};
    out.suffix = {t};
  }
  return out;
}

namespace {

bool fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

}  // namespace

bool verify_expath(const Graph& g, const APSPTable& apsp, const EdgeMask* A, const ExpathStructure& p, int ell,
                   int lambda, std::string* why) {
  if (p.empty()) return fail(why, "empty expath");
  const int lg = expath_log_range(g.n(), g.max_weight());
  if (static_cast<int>(p.blocks.size()) != 2 * lg + 1) return fail(why, "wrong block count");
  auto edge_ok = [&](Vertex a, Vertex b, Dist& len) {
    auto e = g.find_edge(a, b);
    if (!e || (A && (*A)[*e])) return false;
    len += g.edge(*e).w;
    return true;
  };
  auto walk = [&](const std::vector<Vertex>& vs, Dist& len) {
    for (std::size_t i = 0; i + 1 < vs.size(); ++i)
      if (!edge_ok(vs[i], vs[i + 1], len)) return false;
    return true;
  };
  Dist total = 0;
  if (p.prefix.empty() || p.prefix.front() != p.s) return fail(why, "prefix does not start at s");
  if (p.suffix.empty() || p.suffix.back() != p.t) return fail(why, "suffix does not end at t");
  if (static_cast<int>(p.prefix.size()) - 1 > lambda || static_cast<int>(p.suffix.size()) - 1 > lambda)
    return fail(why, "prefix or suffix longer than lambda");
  if (!walk(p.prefix, total)) return fail(why, "prefix uses a missing edge");
  Vertex cur = p.prefix.back();
  for (int i = 0; i < static_cast<int>(p.blocks.size()); ++i) {
    const auto& b = p.blocks[i];
    if (b.phase != i) return fail(why, "block phases out of order");
    Dist len = 0;
    for (const auto& it : b.items) {
      if (it.a != cur) return fail(why, "block items are not contiguous");
      if (it.kind == PathItem::Kind::Edge) {
        if (!edge_ok(it.a, it.b, len)) return fail(why, "interleaving edge missing or removed");
      } else {
        if (it.a == it.b) return fail(why, "trivial piece stored");
        auto path = apsp.path(it.a, it.b);
        if (path.empty()) return fail(why, "piece endpoints disconnected in G");
        if (!walk(path, len)) return fail(why, "piece crosses a removed edge");
      }
      cur = it.b;
    }
    if (len != b.length) return fail(why, "recorded block length mismatch");
    if (len > expath_block_cap(lg, i)) return fail(why, "block " + std::to_string(i) + " exceeds its cap");
    if (block_levels(b) > ell) return fail(why, "block " + std::to_string(i) + " needs too many levels");
    total += len;
  }
  if (p.suffix.front() != cur) return fail(why, "suffix not attached to the last block");
  if (!walk(p.suffix, total)) return fail(why, "suffix uses a missing edge");
  if (total != p.length) return fail(why, "total length mismatch");
  return true;
}

}  // namespace ftdso
