#include "ftdso/forest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ftdso/rng.hpp"
#include "ftdso/serialize.hpp"

namespace ftdso {

ForestParams derive_params(int n, int L, int f, int k, double C) {
  if (L < 2) throw std::invalid_argument("hop cutoff L must be at least 2");
  if (f < 1) throw std::invalid_argument("sensitivity f must be at least 1");
  if (k < 1 || k > 8) throw std::invalid_argument("TZ parameter k must be in [1, 8]");
  if (!(C > 0)) throw std::invalid_argument("constant C must be positive");
  if (n < 0) throw std::invalid_argument("negative vertex count");
  ForestParams P;
  P.n = n;
  P.L = L;
  P.f = f;
  P.k = k;
  P.C = C;
  P.h = std::max(1, static_cast<int>(std::lround(std::sqrt(f * std::log(static_cast<double>(L))))));
  const double base = static_cast<double>(2 * k - 1) * L;
  P.K = static_cast<std::int64_t>(std::ceil(std::pow(base, static_cast<double>(f) / P.h) - 1e-9));
  P.K = std::max<std::int64_t>(P.K, 2);
  P.p = std::pow(static_cast<double>(P.K), -1.0 / f);
  const double ln_n = n > 1 ? std::log(static_cast<double>(n)) : 0.0;
  P.I = std::max(1, static_cast<int>(std::ceil(C * std::pow(11.0, P.h) * ln_n - 1e-9)));
  P.J.assign(P.h + 1, 1);
  for (int r = 0; r < P.h; ++r) {
    double j = 4.0 * std::pow(static_cast<double>(P.K), P.h - r);
    if (j > 1e15) throw BudgetExceeded("round count J_r overflows");
    P.J[r] = static_cast<std::int64_t>(j);
  }
  return P;
}

void SamplingForest::init_offsets() {
  offsets_.assign(params_.h + 2, 0);
  std::int64_t width = 1;
  for (int r = 0; r <= params_.h; ++r) {
    offsets_[r + 1] = offsets_[r] + width;
    width *= params_.K;
  }
}

namespace {

bool contains_sorted(const std::vector<EdgeId>& v, EdgeId e) { return std::binary_search(v.begin(), v.end(), e); }

std::vector<EdgeId> intersect_marks(const std::vector<EdgeId>& A, const EdgeMask& in_sy) {
  std::vector<EdgeId> out;
  for (EdgeId e : A)
    if (in_sy[e]) out.push_back(e);
  return out;
}

std::uint64_t leaf_key(LeafHandle l) { return (static_cast<std::uint64_t>(l.tree) << 40) ^ static_cast<std::uint64_t>(l.index); }

struct TreeBuilder {
  const Graph& g;
  const ForestParams& P;
  const ForestOptions& opts;
  std::uint64_t seed;
  int tree;
  TZBuilder tz;
  SamplingForest::Tree out;
  const std::vector<std::int64_t>& offsets;
  std::int64_t s_entries = 0, a_entries = 0, oracle_words = 0;
  EdgeMask removed, in_a;

  TreeBuilder(const Graph& g_, const ForestParams& P_, const ForestOptions& o, const LevelHierarchy& hier,
              std::uint64_t seed_, int tree_, const std::vector<std::int64_t>& offs)
      : g(g_), P(P_), opts(o), seed(seed_), tree(tree_), tz(g_, hier), offsets(offs),
        removed(g_.m(), 0), in_a(g_.m(), 0) {
    out.nodes.resize(offsets[P.h + 1]);
    if (!opts.lazy_leaves) out.leaves.resize(offsets[P.h + 1] - offsets[P.h]);
  }

  // A_x is given; in_sy marks E(S_y) (all edges for the root).
  void build(int r, std::int64_t q, const std::vector<EdgeId>& A_x, const EdgeMask& in_sy) {
    auto& node = out.nodes[offsets[r] + q];
    Rng rng(derive_seed(seed, "forest/node", static_cast<std::uint64_t>(tree), static_cast<std::uint64_t>(offsets[r] + q)));
    if (r > 0) {
      node.A = intersect_marks(A_x, in_sy);
      a_entries += static_cast<std::int64_t>(node.A.size());
      if (opts.instrument) node.A_full = A_x;
    }
    if (r == P.h) {
      for (EdgeId e = 0; e < g.m(); ++e) removed[e] = in_sy[e] ? 0 : 1;
      for (EdgeId e : A_x) removed[e] = 1;
      TZOracle o = tz.build(&removed);
      oracle_words += static_cast<std::int64_t>(o.words());
      if (!opts.lazy_leaves) out.leaves[q] = std::move(o);
      return;
    }
    EdgeMask marks(g.m(), 0);
    const double pr = std::pow(P.p, P.h - r);
    for (std::int64_t round = 0; round < P.J[r]; ++round) {
      for (EdgeId e = 0; e < g.m(); ++e) removed[e] = in_sy[e] ? 0 : 1;
      for (EdgeId e : A_x)
        if (rng.bernoulli(pr)) removed[e] = 1;
      tz.mark_spanner(&removed, marks);
    }
    for (EdgeId e = 0; e < g.m(); ++e)
      if (marks[e]) node.S.push_back(e);
    s_entries += static_cast<std::int64_t>(node.S.size());
    for (std::int64_t c = 0; c < P.K; ++c) {
      const std::int64_t cq = q * P.K + c;
      Rng crng(derive_seed(seed, "forest/child-A", static_cast<std::uint64_t>(tree),
                           static_cast<std::uint64_t>(offsets[r + 1] + cq)));
      std::vector<EdgeId> child_A;
      for (EdgeId e : A_x)
        if (crng.bernoulli(P.p)) child_A.push_back(e);
      build(r + 1, cq, child_A, marks);
    }
  }
};

}  // namespace

SamplingForest build_forest(const Graph& g, const ForestParams& params, const LevelHierarchy& hier,
                            std::uint64_t seed, const ForestOptions& opts) {
  if (hier.n != g.n()) throw std::invalid_argument("hierarchy does not match the graph");
  if (hier.k != params.k) throw std::invalid_argument("hierarchy level count differs from k");
  auto t0 = std::chrono::steady_clock::now();
  SamplingForest F;
  F.g_ = &g;
  F.params_ = params;
  if (opts.trees) F.params_.I = std::max(1, *opts.trees);
  F.hier_ = hier;
  F.lazy_ = opts.lazy_leaves;
  F.instrumented_ = opts.instrument;
  F.init_offsets();
  const ForestParams& P = F.params_;

  // Upper bound on stored entries: every dictionary holds at most m edges and
  // a leaf oracle at most 2 k n^(1+1/k) words.
  const double m = g.m();
  const double oracle_bound = opts.lazy_leaves ? 0.0 : 2.0 * P.k * std::pow(std::max(g.n(), 1), 1.0 + 1.0 / P.k);
  double per_tree = 0;
  double width = 1;
  for (int r = 0; r < P.h; ++r, width *= static_cast<double>(P.K)) per_tree += width * 2 * m;
  per_tree += width * (m + oracle_bound);
  const double projected = per_tree * P.I;
  F.stats_.projected_entries = static_cast<std::int64_t>(std::min(projected, 9e18));
  if (projected > static_cast<double>(opts.entry_budget))
    throw BudgetExceeded("projected forest size " + std::to_string(static_cast<long long>(projected)) +
                         " entries exceeds the budget of " + std::to_string(opts.entry_budget));

  F.trees_.resize(P.I);
  std::vector<std::int64_t> s_e(P.I), a_e(P.I), o_w(P.I);
  std::atomic<int> next{0};
  std::vector<EdgeId> all(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) all[e] = e;
  const EdgeMask everything(g.m(), 1);
  auto worker = [&]() {
    for (int t = next++; t < P.I; t = next++) {
      TreeBuilder tb(g, P, opts, hier, derive_seed(seed, "forest/tree", static_cast<std::uint64_t>(t)), t,
                     F.offsets_);
      tb.build(0, 0, all, everything);
      F.trees_[t] = std::move(tb.out);
      s_e[t] = tb.s_entries;
      a_e[t] = tb.a_entries;
      o_w[t] = tb.oracle_words;
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(P.I)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  auto& st = F.stats_;
  st.trees = P.I;
  st.nodes = static_cast<std::int64_t>(P.I) * F.offsets_[P.h + 1];
  st.leaves = static_cast<std::int64_t>(P.I) * (F.offsets_[P.h + 1] - F.offsets_[P.h]);
  for (int t = 0; t < P.I; ++t) {
    st.s_entries += s_e[t];
    st.a_entries += a_e[t];
    st.oracle_words += o_w[t];
  }
  st.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return F;
}

std::vector<LeafHandle> SamplingForest::surviving_leaf_indices(const FailureSet& F) const {
  std::vector<LeafHandle> out;
  const int h = params_.h;
  const std::int64_t K = params_.K;
  for (int t = 0; t < trees(); ++t) {
    const auto& nodes = trees_[t].nodes;
    std::int64_t q = 0;
    int r = 0;
    while (r < h) {
      const auto& S_y = nodes[offsets_[r] + q].S;
      bool moved = false;
      for (std::int64_t c = 0; c < K && !moved; ++c) {
        const auto& A_x = nodes[offsets_[r + 1] + q * K + c].A;
        bool ok = true;
        for (EdgeId e : F.edges)
          if (contains_sorted(S_y, e) && !contains_sorted(A_x, e)) {
            ok = false;
            break;
          }
        if (ok) {
          q = q * K + c;
          ++r;
          moved = true;
        }
      }
      if (!moved) break;
    }
    if (r == h) out.push_back({t, q});
  }
  return out;
}

Dist SamplingForest::query_leaves(const std::vector<LeafHandle>& leaves, Vertex s, Vertex t) const {
  if (s == t) return 0;
  Dist best = kInf;
  for (const auto& l : leaves) best = std::min(best, leaf_oracle(l)->query_modified(s, t));
  return best;
}

Dist SamplingForest::query_short(Vertex s, Vertex t, const FailureSet& F) const {
  if (s == t) return 0;
  return query_leaves(surviving_leaf_indices(F), s, t);
}

EdgeMask SamplingForest::leaf_host_mask(LeafHandle l) const {
  const int h = params_.h;
  const auto& parent = node(l.tree, h - 1, l.index / params_.K);
  const auto& leaf = node(l.tree, h, l.index);
  EdgeMask removed(g_->m(), 1);
  for (EdgeId e : parent.S) removed[e] = 0;
  for (EdgeId e : leaf.A) removed[e] = 1;
  return removed;
}

std::shared_ptr<const TZOracle> SamplingForest::leaf_oracle(LeafHandle l) const {
  if (!lazy_) {
    // aliasing constructor: no ownership, the forest outlives its callers
    return std::shared_ptr<const TZOracle>(std::shared_ptr<const TZOracle>(), &trees_[l.tree].leaves[l.index]);
  }
  const auto key = leaf_key(l);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->map.find(key);
    if (it != cache_->map.end()) return it->second;
  }
  EdgeMask removed = leaf_host_mask(l);
  TZBuilder b(*g_, hier_);
  auto o = std::make_shared<const TZOracle>(b.build(&removed));
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (cache_->map.size() >= 4096) cache_->map.clear();
  return cache_->map.emplace(key, o).first->second;
}

namespace {
constexpr std::uint32_t kForestTag = 0x46524f53;  // "SORF"
}

void SamplingForest::serialize(std::vector<std::uint8_t>& out) const {
  put(out, kForestTag);
  put<std::int32_t>(out, params_.n);
  put<std::int32_t>(out, params_.L);
  put<std::int32_t>(out, params_.f);
  put<std::int32_t>(out, params_.k);
  put(out, params_.C);
  put<std::int32_t>(out, params_.I);
  put(out, hier_.seed);
  put_vec(out, hier_.top);
  put<std::uint8_t>(out, lazy_ ? 1 : 0);
  put<std::int64_t>(out, stats_.s_entries);
  put<std::int64_t>(out, stats_.a_entries);
  put<std::int64_t>(out, stats_.oracle_words);
  put<std::int64_t>(out, stats_.projected_entries);
  for (const auto& t : trees_) {
    for (const auto& nd : t.nodes) {
      put_vec(out, nd.S);
      put_vec(out, nd.A);
    }
    for (const auto& o : t.leaves) o.serialize(out);
  }
}

SamplingForest SamplingForest::deserialize(const Graph& g, const std::uint8_t*& p, const std::uint8_t* end) {
  if (get<std::uint32_t>(p, end) != kForestTag) throw FormatError("forest record expected");
  SamplingForest F;
  F.g_ = &g;
  const int n = get<std::int32_t>(p, end);
  const int L = get<std::int32_t>(p, end);
  const int f = get<std::int32_t>(p, end);
  const int k = get<std::int32_t>(p, end);
  const double C = get<double>(p, end);
  const int I = get<std::int32_t>(p, end);
  if (n != g.n()) throw FormatError("forest was built for a different graph");
  F.params_ = derive_params(n, L, f, k, C);
  F.params_.I = I;
  F.hier_.n = n;
  F.hier_.k = k;
  F.hier_.seed = get<std::uint64_t>(p, end);
  F.hier_.top = get_vec<std::uint8_t>(p, end);
  if (static_cast<int>(F.hier_.top.size()) != n) throw FormatError("hierarchy size mismatch");
  F.lazy_ = get<std::uint8_t>(p, end) != 0;
  F.stats_.s_entries = get<std::int64_t>(p, end);
  F.stats_.a_entries = get<std::int64_t>(p, end);
  F.stats_.oracle_words = get<std::int64_t>(p, end);
  F.stats_.projected_entries = get<std::int64_t>(p, end);
  F.init_offsets();
  const auto& P = F.params_;
  F.trees_.resize(I);
  const std::int64_t total = F.offsets_[P.h + 1], leaves = total - F.offsets_[P.h];
  for (auto& t : F.trees_) {
    t.nodes.resize(total);
    for (auto& nd : t.nodes) {
      nd.S = get_vec<EdgeId>(p, end);
      nd.A = get_vec<EdgeId>(p, end);
      for (EdgeId e : nd.S)
        if (e < 0 || e >= g.m()) throw FormatError("edge id out of range");
      for (EdgeId e : nd.A)
        if (e < 0 || e >= g.m()) throw FormatError("edge id out of range");
    }
    if (!F.lazy_) {
      t.leaves.reserve(leaves);
      for (std::int64_t i = 0; i < leaves; ++i) t.leaves.push_back(TZOracle::deserialize(p, end));
    }
  }
  F.stats_.trees = I;
  F.stats_.nodes = static_cast<std::int64_t>(I) * total;
  F.stats_.leaves = static_cast<std::int64_t>(I) * leaves;
  return F;
}

}  // namespace ftdso
