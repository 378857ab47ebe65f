#include "ftdso/tz_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "ftdso/rng.hpp"
#include "ftdso/serialize.hpp"

namespace ftdso {

std::vector<Vertex> LevelHierarchy::level(int i) const {
  std::vector<Vertex> out;
  if (i >= k) return out;
  for (Vertex v = 0; v < n; ++v)
    if (top[v] >= i) out.push_back(v);
  return out;
}

LevelHierarchy sample_hierarchy(int n, int k, std::uint64_t seed) {
  if (k < 1 || k > 8) throw std::invalid_argument("hierarchy depth k must be in [1,8]");
  LevelHierarchy h;
  h.n = n;
  h.k = k;
  h.seed = seed;
  h.top.assign(n, 0);
  if (n == 0) return h;
  Rng rng(derive_seed(seed, "hierarchy"));
  const double p = std::pow(static_cast<double>(n), -1.0 / k);
  for (int i = 1; i < k; ++i)
    for (Vertex v = 0; v < n; ++v)
      if (h.top[v] == i - 1 && rng.bernoulli(p)) h.top[v] = static_cast<std::uint8_t>(i);
  return h;
}

Dist TZOracle::pivot_dist(int i, Vertex v) const {
  std::int32_t d = pivot_dist_[idx(i, v)];
  return d < 0 ? kInf : d;
}

std::optional<Dist> TZOracle::bunch_dist(Vertex v, Vertex x) const {
  auto b = bunch(v);
  auto it = std::lower_bound(b.begin(), b.end(), x, [](const BunchEntry& e, Vertex y) { return e.x() < y; });
  if (it == b.end() || it->x() != x) return std::nullopt;
  return it->d;
}

bool TZOracle::in_bunch(int i, Vertex v, Vertex x) const {
  auto b = bunch(v);
  auto it = std::lower_bound(b.begin(), b.end(), x, [](const BunchEntry& e, Vertex y) { return e.x() < y; });
  return it != b.end() && it->x() == x && (it->levels() >> i & 1);
}

TZOracle::Answer TZOracle::query(Vertex s, Vertex t) const {
  Answer best;
  for (int i = 0; i < k_; ++i) {
    for (int side = 0; side < 2; ++side) {
      Vertex a = side ? t : s, b = side ? s : t;
      Vertex p = pivot(i, a);
      if (p == kNoVertex) continue;
      auto d = bunch_dist(b, p);
      if (!d) continue;
      Dist cand = add_sat(pivot_dist(i, a), *d);
      if (cand < best.value) {
        best.value = cand;
        best.interconnect = p;
      }
    }
  }
  return best;
}

void TZOracle::serialize(std::vector<std::uint8_t>& out) const {
  put<std::int32_t>(out, n_);
  put<std::int32_t>(out, k_);
  put_vec(out, pivot_);
  put_vec(out, pivot_dist_);
  put_vec(out, offsets_);
  put_vec(out, entries_);
}

TZOracle TZOracle::deserialize(const std::uint8_t*& p, const std::uint8_t* end) {
  TZOracle o;
  o.n_ = get<std::int32_t>(p, end);
  o.k_ = get<std::int32_t>(p, end);
  o.pivot_ = get_vec<Vertex>(p, end);
  o.pivot_dist_ = get_vec<std::int32_t>(p, end);
  o.offsets_ = get_vec<std::uint32_t>(p, end);
  o.entries_ = get_vec<BunchEntry>(p, end);
  if (o.offsets_.size() != static_cast<std::size_t>(o.n_) + 1 ||
      o.pivot_.size() != static_cast<std::size_t>(o.n_) * o.k_ || o.offsets_.back() != o.entries_.size())
    throw FormatError("inconsistent oracle record");
  return o;
}

TZBuilder::TZBuilder(const Graph& g, const LevelHierarchy& hier) : g_(g), hier_(hier), cs_(g.n()) {
  if (hier.n != g.n()) throw std::invalid_argument("hierarchy built for a different vertex count");
  if (g.n() >= (1 << 24)) throw std::invalid_argument("graph too large for packed bunch entries");
  levels_.resize(hier.k);
  strata_.resize(hier.k);
  for (int i = 0; i < hier.k; ++i) {
    levels_[i] = hier.level(i);
    for (Vertex v : levels_[i])
      if (!hier.in(i + 1, v)) strata_[i].push_back(v);
  }
  scratch_.resize(g.n());
  dnext_.assign(static_cast<std::size_t>(g.n()) * (hier.k + 1), kInf);
}

TZOracle TZBuilder::build(const EdgeMask* removed, EdgeMask* spanner_marks) {
  TZOracle o;
  run(removed, &o, spanner_marks);
  return o;
}

void TZBuilder::mark_spanner(const EdgeMask* removed, EdgeMask& spanner_marks) {
  run(removed, nullptr, &spanner_marks);
}

void TZBuilder::run(const EdgeMask* removed, TZOracle* out, EdgeMask* marks) {
  const int n = g_.n(), k = hier_.k;
  auto allow = [removed](EdgeId e) { return !removed || (*removed)[e] == 0; };
  auto dX = [&](int i, Vertex v) -> Dist& { return dnext_[static_cast<std::size_t>(v) * (k + 1) + i]; };
  if (out) {
    out->n_ = n;
    out->k_ = k;
    out->pivot_.assign(static_cast<std::size_t>(n) * k, kNoVertex);
    out->pivot_dist_.assign(static_cast<std::size_t>(n) * k, -1);
  }
  for (auto& s : scratch_) s.clear();
  auto add_entry = [&](Vertex v, Vertex x, Dist d, int level) {
    if (d > std::numeric_limits<std::int32_t>::max()) throw std::overflow_error("distance exceeds bunch storage");
    scratch_[v].push_back(
        BunchEntry{static_cast<std::uint32_t>(x) | (static_cast<std::uint32_t>(1u << level) << 24),
                   static_cast<std::int32_t>(d)});
  };

  // p_i(v), d(v, X_i) and the forest of canonical v-p_i(v) paths
  for (Vertex v = 0; v < n; ++v) dX(k, v) = kInf;
  for (int i = 0; i < k; ++i) {
    if (i == 0) {
      for (Vertex v = 0; v < n; ++v) {
        dX(0, v) = 0;
        if (out) {
          out->pivot_[out->idx(0, v)] = v;
          out->pivot_dist_[out->idx(0, v)] = 0;
        }
      }
      continue;
    }
    for (Vertex v = 0; v < n; ++v) dX(i, v) = kInf;
    if (levels_[i].empty()) continue;
    cs_.run(g_, levels_[i], allow);
    for (Vertex v : cs_.settle_order()) {
      dX(i, v) = cs_.dist(v);
      if (out) {
        if (cs_.dist(v) > std::numeric_limits<std::int32_t>::max())
          throw std::overflow_error("distance exceeds bunch storage");
        out->pivot_[out->idx(i, v)] = cs_.origin(v);
        out->pivot_dist_[out->idx(i, v)] = static_cast<std::int32_t>(cs_.dist(v));
      }
      if (marks && cs_.parent_edge(v) != kNoEdge) (*marks)[cs_.parent_edge(v)] = 1;
    }
  }

  // clusters: v joins the cluster of w in X_i \ X_{i+1} iff d(w,v) < d(v, X_{i+1})
  for (int i = 0; i < k; ++i) {
    for (Vertex w : strata_[i]) {
      Vertex src[1] = {w};
      cs_.run(g_, src, allow, [&](Vertex v, Dist d) { return d < dX(i + 1, v); });
      for (Vertex v : cs_.settle_order()) {
        if (out) add_entry(v, w, cs_.dist(v), i);
        if (marks && cs_.parent_edge(v) != kNoEdge) (*marks)[cs_.parent_edge(v)] = 1;
      }
    }
  }
  if (!out) return;

  for (Vertex v = 0; v < n; ++v)
    for (int i = 0; i < k; ++i) {
      Vertex p = out->pivot(i, v);
      if (p != kNoVertex) add_entry(v, p, out->pivot_dist(i, v), i);
    }
  out->offsets_.assign(n + 1, 0);
  out->entries_.clear();
  for (Vertex v = 0; v < n; ++v) {
    auto& s = scratch_[v];
    std::sort(s.begin(), s.end(), [](const BunchEntry& a, const BunchEntry& b) { return a.x() < b.x(); });
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!out->entries_.empty() && out->entries_.size() > out->offsets_[v] &&
          out->entries_.back().x() == s[j].x()) {
        out->entries_.back().packed |= s[j].packed;
      } else {
        out->entries_.push_back(s[j]);
      }
    }
    out->offsets_[v + 1] = static_cast<std::uint32_t>(out->entries_.size());
  }
}

TZBuildResult build_oracle_and_spanner(const Graph& g, const EdgeMask* removed, const LevelHierarchy& hier) {
  TZBuilder b(g, hier);
  EdgeMask marks(g.m(), 0);
  TZBuildResult r{b.build(removed, &marks), {}};
  for (EdgeId e = 0; e < g.m(); ++e)
    if (marks[e]) r.spanner.push_back(e);
  return r;
}

Witness witness(const TZOracle& o, const Graph& g, const EdgeMask* removed, Vertex s, Vertex t) {
  auto ans = o.query(s, t);
  if (ans.value >= kInf) throw GraphError("witness requested for a disconnected pair");
  CanonicalSearch cs(g.n());
  Vertex src[1] = {ans.interconnect};
  cs.run(g, src, [removed](EdgeId e) { return !removed || (*removed)[e] == 0; });
  Witness w;
  w.interconnect = ans.interconnect;
  for (Vertex x = s; x != kNoVertex; x = cs.parent(x)) w.path.push_back(x);  // s .. u
  std::vector<Vertex> tail;
  for (Vertex x = t; x != ans.interconnect; x = cs.parent(x)) tail.push_back(x);
  w.path.insert(w.path.end(), tail.rbegin(), tail.rend());
  return w;
}

}  // namespace ftdso
