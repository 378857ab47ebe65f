#include "ftdso/dso.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ftdso/rng.hpp"
#include "ftdso/serialize.hpp"

namespace ftdso {

DsoParams derive_dso_params(int n, const DsoConfig& cfg) {
  if (cfg.f < 2) throw std::invalid_argument("the oracle needs f >= 2");
  if (!(cfg.alpha > 0 && cfg.alpha < 0.5)) throw std::invalid_argument("alpha must lie in (0, 1/2)");
  if (!(cfg.eps > 0 && cfg.eps < 3)) throw std::invalid_argument("eps must lie in (0, 3)");
  if (n < 1) throw std::invalid_argument("empty graph");
  DsoParams P;
  P.n = n;
  P.f = cfg.f;
  P.alpha = cfg.alpha;
  P.eps = cfg.eps;
  P.Delta = 3 - cfg.eps;
  if (cfg.L_override) {
    if (*cfg.L_override < 2) throw std::invalid_argument("L override must be at least 2");
    P.L = *cfg.L_override;
  } else {
    const double raw = std::pow(static_cast<double>(n), cfg.alpha / (cfg.f + 1));
    P.L = std::max(2, static_cast<int>(std::ceil(raw - 1e-9)));
  }
  P.lambda_raw = P.Delta / 96.0 * cfg.eps * P.L;
  if (cfg.lambda_override) {
    if (*cfg.lambda_override < 1 || *cfg.lambda_override > P.L)
      throw std::invalid_argument("lambda override must lie in [1, L]");
    P.lambda = *cfg.lambda_override;
    P.granularity = P.lambda;
  } else {
    P.lambda = std::clamp(static_cast<int>(std::ceil(P.lambda_raw - 1e-9)), 1, P.L);
    P.degenerate = P.lambda_raw < 1;
    P.granularity = P.degenerate ? 0 : P.lambda;
  }
  P.delta = 8.0 * P.lambda / P.L;
  if (P.degenerate) {
    P.ball_cap = n;
  } else {
    double cap = std::pow(static_cast<double>(P.L), P.f);
    P.ball_cap = static_cast<std::int64_t>(std::min(cap, static_cast<double>(n)));
  }
  return P;
}

namespace {

class BallScanner {
 public:
  explicit BallScanner(int n) : dist_(n, -1) {}

  BallRecord run(const Graph& g, const EdgeMask& removed, Vertex x, int lambda, std::int64_t cap,
                 const PivotSets& P) {
    BallRecord rec;
    queue_.clear();
    queue_.push_back(x);
    dist_[x] = 0;
    std::size_t head = 0;
    while (head < queue_.size()) {
      const Vertex v = queue_[head++];
      if (dist_[v] >= lambda) continue;
      for (const Arc& a : g.neighbors(v)) {
        if (removed[a.id] || dist_[a.to] >= 0) continue;
        dist_[a.to] = dist_[v] + 1;
        queue_.push_back(a.to);
      }
    }
    rec.dense = static_cast<std::int64_t>(queue_.size()) > cap;
    if (rec.dense) {
      int best = -1;
      for (Vertex v : queue_)
        if (P.in_new[v] && (best < 0 || dist_[v] < best || (dist_[v] == best && v < rec.new_pivot))) {
          best = dist_[v];
          rec.new_pivot = v;
        }
    } else {
      for (Vertex v : queue_)
        if (P.in_B[v]) rec.pivots.push_back(v);
      std::sort(rec.pivots.begin(), rec.pivots.end());
    }
    for (Vertex v : queue_) dist_[v] = -1;
    return rec;
  }

 private:
  std::vector<int> dist_;
  std::vector<Vertex> queue_;
};

}  // namespace

BallRecord classify_ball(const Graph& g, const EdgeMask& removed, Vertex x, int lambda, std::int64_t cap,
                         const PivotSets& pivots) {
  BallScanner sc(g.n());
  return sc.run(g, removed, x, lambda, cap, pivots);
}

BallIndex build_ball_index(const SamplingForest& forest, const PivotSets& pivots, int lambda, std::int64_t cap,
                           unsigned threads) {
  const Graph& g = forest.graph();
  const auto& P = forest.params();
  const std::int64_t width = forest.offset(P.h + 1) - forest.offset(P.h);
  BallIndex idx;
  idx.n = g.n();
  idx.leaves = static_cast<std::int64_t>(forest.trees()) * width;
  struct LeafBalls {
    std::vector<std::int32_t> counts;
    std::vector<Vertex> entries;
    std::vector<Vertex> marker;
  };
  std::vector<LeafBalls> per(idx.leaves);
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    BallScanner sc(g.n());
    for (std::int64_t li = next++; li < idx.leaves; li = next++) {
      const EdgeMask mask = forest.leaf_host_mask({static_cast<int>(li / width), li % width});
      auto& out = per[li];
      out.counts.resize(g.n());
      out.marker.resize(g.n());
      for (Vertex x = 0; x < g.n(); ++x) {
        BallRecord r = sc.run(g, mask, x, lambda, cap, pivots);
        if (r.dense) {
          out.counts[x] = 0;
          out.marker[x] = r.new_pivot == kNoVertex ? BallIndex::kDenseNoPivot : r.new_pivot;
        } else {
          out.counts[x] = static_cast<std::int32_t>(r.pivots.size());
          out.marker[x] = BallIndex::kSparse;
          out.entries.insert(out.entries.end(), r.pivots.begin(), r.pivots.end());
        }
      }
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::int64_t>(idx.leaves, 1))));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  idx.offsets.reserve(static_cast<std::size_t>(idx.leaves) * g.n() + 1);
  idx.offsets.push_back(0);
  for (auto& lb : per) {
    for (auto c : lb.counts) idx.offsets.push_back(idx.offsets.back() + c);
    idx.entries.insert(idx.entries.end(), lb.entries.begin(), lb.entries.end());
    idx.marker.insert(idx.marker.end(), lb.marker.begin(), lb.marker.end());
    lb = LeafBalls{};
  }
  return idx;
}

const char* case_name(WeightCase c) {
  switch (c) {
    case WeightCase::Same: return "same";
    case WeightCase::Short: return "short";
    case WeightCase::PivotEnd: return "a";
    case WeightCase::Sparse: return "b";
    case WeightCase::Dense: return "c";
    case WeightCase::None: return "none";
  }
  return "?";
}

Dso::Dso(const Graph& g, const DsoConfig& cfg) : cfg_(cfg), g_(g) {}

std::unique_ptr<Dso> Dso::build(const Graph& g, const DsoConfig& cfg) {
  if (!g.unweighted()) throw std::invalid_argument("the oracle expects an unweighted graph");
  auto t0 = std::chrono::steady_clock::now();
  std::unique_ptr<Dso> d(new Dso(g, cfg));
  d->params_ = derive_dso_params(g.n(), cfg);
  const DsoParams& P = d->params_;
  const int n = g.n();

  auto hier = sample_hierarchy(n, P.k, derive_seed(cfg.seed, "hierarchy"));
  auto fp = derive_params(n, P.L, P.f, P.k, cfg.C);
  ForestOptions fo;
  fo.threads = cfg.threads;
  fo.lazy_leaves = cfg.lazy_leaves;
  fo.entry_budget = cfg.entry_budget;
  d->forest_ = build_forest(d->g_, fp, hier, derive_seed(cfg.seed, "forest"), fo);

  d->pivots_ = sample_pivots(n, P.f, P.lambda, P.L, P.lambda, cfg.C_prime, cfg.C_second, cfg.seed);

  const double ball_slots = static_cast<double>(d->forest_.stats().leaves) * n;
  if (ball_slots > static_cast<double>(cfg.entry_budget))
    throw BudgetExceeded("ball index needs " + std::to_string(static_cast<long long>(ball_slots)) +
                         " records, over the budget");
  d->balls_ = build_ball_index(d->forest_, d->pivots_, P.lambda, P.ball_cap, cfg.threads);
  d->finish_setup();
  d->build_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return d;
}

void Dso::finish_setup() {
  apsp_ = APSPTable(g_);
  ctx_ = std::make_unique<FTContext>(g_, apsp_, pivots_, params_.f, params_.eps, params_.L);
}

struct Dso::QueryCtx {
  const FailureSet& F;
  std::vector<LeafHandle> leaves;
  std::vector<std::int64_t> leaf_ids;
  ShortOracleFn short_fn;
};

FTTree& Dso::tree(Vertex a, Vertex b, int lambda) const {
  const auto key = std::make_tuple(a, b, lambda);
  {
    std::lock_guard<std::mutex> lock(memo_mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return *it->second;
  }
  auto t = std::make_unique<FTTree>(*ctx_, a, b, lambda);
  std::lock_guard<std::mutex> lock(memo_mu_);
  return *memo_.emplace(key, std::move(t)).first->second;
}

Dist Dso::ft(const QueryCtx& q, Vertex a, Vertex b, int lambda, bool& failure) const {
  if (a == b) return 0;
  ++counters_.ft_queries;
  bool f = false;
  Dist d = tree(a, b, lambda).query(q.F, q.short_fn, nullptr, &f);
  failure = failure || f;
  return d;
}

EdgeWeight Dso::weight(const QueryCtx& q, Vertex u, Vertex v) const {
  EdgeWeight w;
  if (u == v) {
    w.value = 0;
    w.branch = w.used = WeightCase::Same;
    return w;
  }
  ++counters_.weights;
  const Dist ds = q.short_fn(u, v);
  Dist wp = kInf;
  const auto& in_B = pivots_.in_B;
  if (in_B[u] || in_B[v]) {
    w.branch = WeightCase::PivotEnd;
    ++counters_.case_a;
    if (in_B[v]) wp = std::min(wp, ft(q, u, v, 0, w.sampling_failure));
    if (in_B[u]) wp = std::min(wp, ft(q, v, u, 0, w.sampling_failure));
  } else {
    bool sparse_u = true, sparse_v = true;
    for (auto li : q.leaf_ids) {
      sparse_u = sparse_u && balls_.sparse(li, u);
      sparse_v = sparse_v && balls_.sparse(li, v);
    }
    if (sparse_u || sparse_v) {
      w.branch = WeightCase::Sparse;
      ++counters_.case_b;
      const Vertex x = sparse_u ? u : v, y = sparse_u ? v : u;
      for (auto li : q.leaf_ids)
        for (Vertex b : balls_.ball_pivots(li, x)) {
          const Dist head = q.short_fn(x, b);
          if (head >= wp) continue;
          wp = std::min(wp, add_sat(head, ft(q, y, b, 0, w.sampling_failure)));
        }
    } else {
      w.branch = WeightCase::Dense;
      ++counters_.case_c;
      Vertex bu = kNoVertex, bv = kNoVertex;
      for (auto li : q.leaf_ids) {
        const Vertex mu = balls_.marker[balls_.slot(li, u)], mv = balls_.marker[balls_.slot(li, v)];
        if (bu == kNoVertex && mu >= 0) bu = mu;
        if (bv == kNoVertex && mv >= 0) bv = mv;
      }
      if (bu == kNoVertex || bv == kNoVertex) {
        w.sampling_failure = true;
        ++counters_.dense_without_pivot;
      } else {
        wp = add_sat(ft(q, bu, bv, params_.granularity, w.sampling_failure), 2 * params_.lambda);
      }
    }
  }
  w.value = std::min(ds, wp);
  if (w.value >= kInf) w.used = WeightCase::None;
  else w.used = ds <= wp ? WeightCase::Short : w.branch;
  return w;
}

EdgeWeight Dso::edge_weight(Vertex u, Vertex v, const FailureSet& F) const {
  F.validate(g_, params_.f);
  QueryCtx q{F, forest_.surviving_leaf_indices(F), {}, {}};
  const std::int64_t width = forest_.offset(forest_.params().h + 1) - forest_.offset(forest_.params().h);
  for (auto l : q.leaves) q.leaf_ids.push_back(static_cast<std::int64_t>(l.tree) * width + l.index);
  q.short_fn = [this, &q](Vertex a, Vertex b) { return a == b ? Dist{0} : forest_.query_leaves(q.leaves, a, b); };
  return weight(q, u, v);
}

QueryResult Dso::query(Vertex s, Vertex t, const FailureSet& F) const {
  if (s < 0 || t < 0 || s >= g_.n() || t >= g_.n()) throw std::out_of_range("query vertex out of range");
  F.validate(g_, params_.f);
  ++counters_.queries;
  QueryResult r;
  if (s == t) {
    r.answer = 0;
    r.aux_vertices = {s};
    r.aux_path = {s};
    r.weights = {EdgeWeight{0, WeightCase::Same, WeightCase::Same, false}};
    r.case_label = "same";
    return r;
  }
  QueryCtx q{F, forest_.surviving_leaf_indices(F), {}, {}};
  const std::int64_t width = forest_.offset(forest_.params().h + 1) - forest_.offset(forest_.params().h);
  for (auto l : q.leaves) q.leaf_ids.push_back(static_cast<std::int64_t>(l.tree) * width + l.index);
  q.short_fn = [this, &q](Vertex a, Vertex b) { return a == b ? Dist{0} : forest_.query_leaves(q.leaves, a, b); };

  r.aux_vertices = {s, t};
  for (Vertex x : F.endpoints(g_))
    if (x != s && x != t) r.aux_vertices.push_back(x);
  const int V = static_cast<int>(r.aux_vertices.size());
  r.weights.assign(static_cast<std::size_t>(V) * V, EdgeWeight{});
  for (int i = 0; i < V; ++i) {
    r.weights[i * V + i] = EdgeWeight{0, WeightCase::Same, WeightCase::Same, false};
    for (int j = i + 1; j < V; ++j) {
      EdgeWeight w = weight(q, r.aux_vertices[i], r.aux_vertices[j]);
      r.weights[i * V + j] = r.weights[j * V + i] = w;
      r.sampling_failure = r.sampling_failure || w.sampling_failure;
    }
  }

  // Dijkstra on the complete graph H^F, ties towards the smaller index.
  std::vector<Dist> dist(V, kInf);
  std::vector<int> prev(V, -1);
  std::vector<char> done(V, 0);
  dist[0] = 0;
  for (int round = 0; round < V; ++round) {
    int best = -1;
    for (int i = 0; i < V; ++i)
      if (!done[i] && dist[i] < kInf && (best < 0 || dist[i] < dist[best])) best = i;
    if (best < 0) break;
    done[best] = 1;
    for (int j = 0; j < V; ++j) {
      const Dist nd = add_sat(dist[best], r.weights[best * V + j].value);
      if (!done[j] && nd < dist[j]) {
        dist[j] = nd;
        prev[j] = best;
      }
    }
  }
  r.answer = dist[1];
  if (r.answer >= kInf) {
    r.case_label = "none";
    return r;
  }
  std::vector<int> idx;
  for (int x = 1; x >= 0; x = prev[x]) idx.push_back(x);
  std::reverse(idx.begin(), idx.end());
  bool seen[6] = {false, false, false, false, false, false};
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    r.aux_path.push_back(r.aux_vertices[idx[i]]);
    seen[static_cast<int>(r.weights[idx[i] * V + idx[i + 1]].used)] = true;
  }
  r.aux_path.push_back(t);
  for (int c = 0; c < 6; ++c)
    if (seen[c]) {
      if (!r.case_label.empty()) r.case_label += "+";
      r.case_label += case_name(static_cast<WeightCase>(c));
    }
  return r;
}

std::size_t Dso::cached_ft_trees() const {
  std::lock_guard<std::mutex> lock(memo_mu_);
  return memo_.size();
}

void Dso::clear_ft_cache() const {
  std::lock_guard<std::mutex> lock(memo_mu_);
  memo_.clear();
}

SpaceReport Dso::measure_space(int samples) const {
  SpaceReport S;
  S.forest = forest_.stats().words();
  S.pivots = static_cast<std::int64_t>(pivots_.B.size() + pivots_.new_pivots.size());
  S.balls = balls_.words();
  S.lca = static_cast<std::int64_t>(ctx_->lca_words());
  S.apsp = static_cast<std::int64_t>(apsp_.words());
  S.ft_exact = true;
  Rng rng(derive_seed(cfg_.seed, "space-sample"));
  const int n = g_.n();
  auto family = [&](std::int64_t pairs, int lambda, auto&& pair_at) {
    if (pairs == 0) return;
    S.ft_pairs += pairs;
    const bool exact = pairs <= samples;
    const std::int64_t count = exact ? pairs : samples;
    double sum = 0;
    for (std::int64_t i = 0; i < count; ++i) {
      const std::int64_t at = exact ? i : static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(pairs)));
      auto [a, b] = pair_at(at);
      FTTree t(*ctx_, a, b, lambda);
      t.build_all();
      sum += static_cast<double>(t.words());
    }
    S.ft_sampled += count;
    S.ft_exact = S.ft_exact && exact;
    S.ft_trees += static_cast<std::int64_t>(std::llround(sum / count * pairs));
  };
  const auto& B = pivots_.B;
  family(static_cast<std::int64_t>(n) * B.size(), 0, [&](std::int64_t i) {
    return std::pair<Vertex, Vertex>(static_cast<Vertex>(i / B.size()), B[i % B.size()]);
  });
  if (!params_.degenerate) {
    const auto& N = pivots_.new_pivots;
    family(static_cast<std::int64_t>(N.size()) * N.size(), params_.granularity, [&](std::int64_t i) {
      return std::pair<Vertex, Vertex>(N[i / N.size()], N[i % N.size()]);
    });
  }
  return S;
}

namespace {

constexpr std::uint32_t kDsoTag = 0x4f534446;  // "FDSO"
constexpr char kMagic[8] = {'F', 'T', 'D', 'S', 'O', 'B', 'I', 'N'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void Dso::serialize(std::vector<std::uint8_t>& out) const {
  put(out, kDsoTag);
  put<std::int32_t>(out, cfg_.f);
  put(out, cfg_.alpha);
  put(out, cfg_.eps);
  put<std::int32_t>(out, cfg_.L_override.value_or(-1));
  put<std::int32_t>(out, cfg_.lambda_override.value_or(-1));
  put(out, cfg_.C);
  put(out, cfg_.C_prime);
  put(out, cfg_.C_second);
  put(out, cfg_.seed);
  put<std::uint8_t>(out, cfg_.lazy_leaves ? 1 : 0);
  put(out, cfg_.entry_budget);
  put<std::int32_t>(out, g_.n());
  std::vector<std::int32_t> edges;
  edges.reserve(static_cast<std::size_t>(g_.m()) * 3);
  for (const auto& e : g_.edges()) {
    edges.push_back(e.u);
    edges.push_back(e.v);
    edges.push_back(e.w);
  }
  put_vec(out, edges);
  forest_.serialize(out);
  put_vec(out, pivots_.in_B);
  put_vec(out, pivots_.in_new);
  put(out, pivots_.prob_B);
  put(out, pivots_.prob_new);
  put<std::int64_t>(out, balls_.leaves);
  put_vec(out, balls_.offsets);
  put_vec(out, balls_.entries);
  put_vec(out, balls_.marker);
}

std::unique_ptr<Dso> Dso::deserialize(const std::vector<std::uint8_t>& bytes) {
  const std::uint8_t* p = bytes.data();
  const std::uint8_t* end = p + bytes.size();
  if (get<std::uint32_t>(p, end) != kDsoTag) throw FormatError("oracle record expected");
  DsoConfig cfg;
  cfg.f = get<std::int32_t>(p, end);
  cfg.alpha = get<double>(p, end);
  cfg.eps = get<double>(p, end);
  if (auto L = get<std::int32_t>(p, end); L >= 0) cfg.L_override = L;
  if (auto l = get<std::int32_t>(p, end); l >= 0) cfg.lambda_override = l;
  cfg.C = get<double>(p, end);
  cfg.C_prime = get<double>(p, end);
  cfg.C_second = get<double>(p, end);
  cfg.seed = get<std::uint64_t>(p, end);
  cfg.lazy_leaves = get<std::uint8_t>(p, end) != 0;
  cfg.entry_budget = get<std::uint64_t>(p, end);
  const int n = get<std::int32_t>(p, end);
  if (n < 1) throw FormatError("bad vertex count");
  Graph g(n);
  auto edges = get_vec<std::int32_t>(p, end);
  if (edges.size() % 3) throw FormatError("bad edge list");
  for (std::size_t i = 0; i < edges.size(); i += 3) {
    if (edges[i] < 0 || edges[i] >= n || edges[i + 1] < 0 || edges[i + 1] >= n) throw FormatError("bad edge");
    g.add_edge(edges[i], edges[i + 1], edges[i + 2]);
  }
  std::unique_ptr<Dso> d(new Dso(g, cfg));
  d->params_ = derive_dso_params(n, cfg);
  d->forest_ = SamplingForest::deserialize(d->g_, p, end);
  auto& P = d->pivots_;
  P.in_B = get_vec<std::uint8_t>(p, end);
  P.in_new = get_vec<std::uint8_t>(p, end);
  if (static_cast<int>(P.in_B.size()) != n || static_cast<int>(P.in_new.size()) != n)
    throw FormatError("pivot set size mismatch");
  P.prob_B = get<double>(p, end);
  P.prob_new = get<double>(p, end);
  for (Vertex v = 0; v < n; ++v) {
    if (P.in_B[v]) P.B.push_back(v);
    if (P.in_new[v]) P.new_pivots.push_back(v);
  }
  auto& Bi = d->balls_;
  Bi.n = n;
  Bi.leaves = get<std::int64_t>(p, end);
  Bi.offsets = get_vec<std::int64_t>(p, end);
  Bi.entries = get_vec<Vertex>(p, end);
  Bi.marker = get_vec<Vertex>(p, end);
  const auto slots = static_cast<std::size_t>(Bi.leaves) * n;
  if (Bi.offsets.size() != slots + 1 || Bi.marker.size() != slots ||
      Bi.offsets.back() != static_cast<std::int64_t>(Bi.entries.size()))
    throw FormatError("ball index size mismatch");
  for (Vertex v : Bi.entries)
    if (v < 0 || v >= n) throw FormatError("ball entry out of range");
  for (Vertex v : Bi.marker)
    if (v < BallIndex::kDenseNoPivot || v >= n) throw FormatError("ball marker out of range");
  if (p != end) throw FormatError("trailing bytes after oracle");
  d->finish_setup();
  return d;
}

void Dso::save(const std::string& path) const {
  std::vector<std::uint8_t> payload;
  serialize(payload);
  write_framed(path, kMagic, kVersion, payload);
}

std::unique_ptr<Dso> Dso::load(const std::string& path) { return deserialize(read_framed(path, kMagic, kVersion)); }

}  // namespace ftdso
