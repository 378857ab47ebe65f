#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ftdso/budget.hpp"
#include "ftdso/forest.hpp"
#include "ftdso/ft_tree.hpp"
#include "ftdso/graph.hpp"
#include "ftdso/shortest_paths.hpp"

namespace ftdso {

struct DsoConfig {
  int f = 2;
  double alpha = 0.4;
  double eps = 1.0;
  std::optional<int> L_override;
  std::optional<int> lambda_override;
  double C = 1.0;         // forest trees
  double C_prime = 1.0;   // new pivots
  double C_second = 1.0;  // pivots B
  std::uint64_t seed = 1;
  unsigned threads = 1;   // never stored; results do not depend on it
  bool lazy_leaves = true;
  std::uint64_t entry_budget = 400'000'000;
};

struct DsoParams {
  int n = 0;
  int f = 2;
  double alpha = 0.4;
  double eps = 1.0;
  double Delta = 2.0;       // 3 - eps
  int L = 2;
  double lambda_raw = 0;    // before rounding and clamping
  int lambda = 1;           // radius of the balls and pivot density
  int granularity = 1;      // lambda of the dense-ball FT-trees; 0 in degenerate mode
  bool degenerate = false;  // lambda_raw < 1: no dense case, every ball counts as sparse
  double delta = 0;         // 8 lambda / L
  int k = 2;
  std::int64_t ball_cap = 0;  // L^f, or n in degenerate mode
};

// L = ceil(n^(alpha/(f+1))), lambda = ceil(Delta eps L / 96) clamped to [1, L].
// Throws std::invalid_argument on f < 2, alpha or eps out of range.
DsoParams derive_dso_params(int n, const DsoConfig& cfg);

struct BallRecord {
  bool dense = false;
  std::vector<Vertex> pivots;     // B cap ball, sparse balls only, sorted
  Vertex new_pivot = kNoVertex;   // dense balls: nearest new pivot, kNoVertex if none within lambda
};

// Search from x in g minus removed, radius lambda, stopping once more than cap
// vertices are discovered.
BallRecord classify_ball(const Graph& g, const EdgeMask& removed, Vertex x, int lambda, std::int64_t cap,
                         const PivotSets& pivots);

// Ball records for every (forest leaf, vertex).
struct BallIndex {
  static constexpr Vertex kSparse = -1;
  static constexpr Vertex kDenseNoPivot = -2;
  int n = 0;
  std::int64_t leaves = 0;
  std::vector<std::int64_t> offsets;  // leaves * n + 1, into entries
  std::vector<Vertex> entries;
  std::vector<Vertex> marker;         // kSparse, kDenseNoPivot or the new pivot

  std::size_t slot(std::int64_t leaf, Vertex x) const { return static_cast<std::size_t>(leaf) * n + x; }
  bool sparse(std::int64_t leaf, Vertex x) const { return marker[slot(leaf, x)] == kSparse; }
  std::span<const Vertex> ball_pivots(std::int64_t leaf, Vertex x) const {
    const auto i = slot(leaf, x);
    return {entries.data() + offsets[i], entries.data() + offsets[i + 1]};
  }
  std::int64_t words() const { return static_cast<std::int64_t>(entries.size() + marker.size()); }
};

enum class WeightCase : std::uint8_t { Same, Short, PivotEnd, Sparse, Dense, None };
const char* case_name(WeightCase c);

struct EdgeWeight {
  Dist value = kInf;
  WeightCase branch = WeightCase::None;  // which of (a) / (b) / (c) computed w'
  WeightCase used = WeightCase::None;    // Short if the short-path estimate won
  bool sampling_failure = false;
};

struct QueryResult {
  Dist answer = kInf;
  std::vector<Vertex> aux_vertices;           // s, t, then failure endpoints
  std::vector<EdgeWeight> weights;            // row-major over aux_vertices
  std::vector<Vertex> aux_path;               // s ... t in H^F
  std::string case_label;                     // cases on the H^F path, e.g. "short+a"
  bool sampling_failure = false;
};

struct SpaceReport {
  std::int64_t forest = 0;
  std::int64_t pivots = 0;
  std::int64_t balls = 0;
  std::int64_t lca = 0;
  std::int64_t ft_trees = 0;      // all FT-trees the oracle stores, fully built
  std::int64_t ft_pairs = 0;
  std::int64_t ft_sampled = 0;    // trees actually built to estimate ft_trees
  bool ft_exact = false;          // every tree was built
  std::int64_t apsp = 0;          // kept for path expansion, not counted in total
  std::int64_t total() const { return forest + pivots + balls + lca + ft_trees; }
};

struct DsoCounters {
  std::atomic<std::int64_t> queries{0};
  std::atomic<std::int64_t> weights{0};
  std::atomic<std::int64_t> case_a{0};
  std::atomic<std::int64_t> case_b{0};
  std::atomic<std::int64_t> case_c{0};
  std::atomic<std::int64_t> dense_without_pivot{0};
  std::atomic<std::int64_t> ft_queries{0};
};

class Dso {
 public:
  static std::unique_ptr<Dso> build(const Graph& g, const DsoConfig& cfg);
  static std::unique_ptr<Dso> deserialize(const std::vector<std::uint8_t>& bytes);
  static std::unique_ptr<Dso> load(const std::string& path);

  void serialize(std::vector<std::uint8_t>& out) const;
  void save(const std::string& path) const;

  const DsoConfig& config() const { return cfg_; }
  const DsoParams& params() const { return params_; }
  const Graph& graph() const { return g_; }
  const APSPTable& apsp() const { return apsp_; }
  const SamplingForest& forest() const { return forest_; }
  const PivotSets& pivots() const { return pivots_; }
  const BallIndex& balls() const { return balls_; }
  const FTContext& ft_context() const { return *ctx_; }
  const DsoCounters& counters() const { return counters_; }
  double build_seconds() const { return build_seconds_; }

  // w_{H^F}(u, v) for one pair, F validated against f.
  EdgeWeight edge_weight(Vertex u, Vertex v, const FailureSet& F) const;
  QueryResult query(Vertex s, Vertex t, const FailureSet& F) const;

  // Eager-equivalent size in words. FT-trees are built on demand during
  // queries; here up to `samples` of them are built in full and the mean is
  // scaled to the number of trees the oracle defines.
  SpaceReport measure_space(int samples = 20) const;
  std::size_t cached_ft_trees() const;
  void clear_ft_cache() const;

  Dso(const Dso&) = delete;
  Dso& operator=(const Dso&) = delete;

 private:
  Dso(const Graph& g, const DsoConfig& cfg);
  void finish_setup();

  struct QueryCtx;
  EdgeWeight weight(const QueryCtx& q, Vertex u, Vertex v) const;
  Dist ft(const QueryCtx& q, Vertex a, Vertex b, int lambda, bool& failure) const;
  FTTree& tree(Vertex a, Vertex b, int lambda) const;

  DsoConfig cfg_;
  DsoParams params_;
  Graph g_;
  APSPTable apsp_;
  SamplingForest forest_;
  PivotSets pivots_;
  BallIndex balls_;
  std::unique_ptr<FTContext> ctx_;
  double build_seconds_ = 0;

  mutable std::mutex memo_mu_;
  mutable std::map<std::tuple<Vertex, Vertex, int>, std::unique_ptr<FTTree>> memo_;
  mutable DsoCounters counters_;
};

BallIndex build_ball_index(const SamplingForest& forest, const PivotSets& pivots, int lambda, std::int64_t cap,
                           unsigned threads);

}  // namespace ftdso
