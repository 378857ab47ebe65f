#include "ftdso/ft_tree.hpp"

#include <algorithm>
#include <cmath>

#include "ftdso/rng.hpp"

namespace ftdso {

PivotSets sample_pivots(int n, int f, double lambda_B, int L, double lambda, double C_prime, double C_second,
                        std::uint64_t seed) {
  PivotSets P;
  const double lg = n > 1 ? std::log2(static_cast<double>(n)) : 1.0;
  P.prob_B = std::min(1.0, C_second * f * lg / std::max(lambda_B, 1e-12));
  const double scale = std::max(lambda, 1e-12) * std::pow(static_cast<double>(L), f - 1);
  P.prob_new = std::min(1.0, C_prime * f * lg / scale);
  P.in_B.assign(n, 0);
  P.in_new.assign(n, 0);
  Rng rb(derive_seed(seed, "pivots-B"));
  Rng rn(derive_seed(seed, "pivots-newB"));
  for (Vertex v = 0; v < n; ++v) {
    if (rb.bernoulli(P.prob_B)) {
      P.in_B[v] = 1;
      P.B.push_back(v);
    }
    if (rn.bernoulli(P.prob_new)) {
      P.in_new[v] = 1;
      P.new_pivots.push_back(v);
    }
  }
  return P;
}

namespace {

// Is there an integer i >= 0 with a < base^i <= c?
bool crosses(double base, Dist a, Dist c) {
  if (c < 1) return false;
  int i = 0;
  if (a >= 1) {
    i = static_cast<int>(std::floor(std::log(static_cast<double>(a)) / std::log(base)));
    while (i > 0 && std::pow(base, i) > static_cast<double>(a)) --i;
    while (std::pow(base, i) <= static_cast<double>(a)) ++i;
  }
  return std::pow(base, i) <= static_cast<double>(c);
}

}  // namespace

std::vector<int> compute_netpoints(const std::vector<Dist>& pre, double eps, int lambda) {
  const int m = static_cast<int>(pre.size()) - 1;
  std::vector<char> net(m + 1, 0);
  const Dist total = pre.back();
  if (lambda > 0 && total <= 2 * static_cast<Dist>(lambda)) {
    std::vector<int> all(m + 1);
    for (int i = 0; i <= m; ++i) all[i] = i;
    return all;
  }
  const int lo = std::min(lambda, m), hi = std::max(m - lambda, lo);
  for (int i = 0; i <= lo; ++i) net[i] = 1;
  for (int i = hi; i <= m; ++i) net[i] = 1;
  const double base = 1.0 + eps / 36.0;
  for (int j = lo; j < m && j <= hi; ++j)
    if (crosses(base, pre[j] - pre[lo], pre[j + 1] - pre[lo])) net[j] = net[j + 1] = 1;
  for (int j = hi; j >= 1 && j >= lo; --j)
    if (crosses(base, pre[hi] - pre[j], pre[hi] - pre[j - 1])) net[j] = net[j - 1] = 1;
  std::vector<int> out;
  for (int i = 0; i <= m; ++i)
    if (net[i]) out.push_back(i);
  return out;
}

FTContext::FTContext(const Graph& g, const APSPTable& apsp, const PivotSets& pivots, int f, double eps, int L)
    : g_(g), apsp_(apsp), pivots_(pivots), f_(f), eps_(eps), L_(L), trees_(g.n()) {
  if (!g.unweighted()) throw std::invalid_argument("FT-trees require an unweighted graph");
  for (Vertex v = 0; v < g.n(); ++v)
    if (pivots.in_B[v] || pivots.in_new[v]) trees_[v] = std::make_unique<SPTreeWithLCA>(g, v);
}

const SPTreeWithLCA& FTContext::pivot_tree(Vertex p) const {
  if (!trees_[p]) throw std::logic_error("vertex is not a pivot");
  return *trees_[p];
}

std::size_t FTContext::lca_words() const {
  std::size_t w = 0;
  for (const auto& t : trees_)
    if (t) w += t->words();
  return w;
}

FTTree::FTTree(const FTContext& ctx, Vertex a, Vertex b, int lambda) : ctx_(ctx), a_(a), b_(b), lambda_(lambda) {
  EdgeMask none(ctx.graph().m(), 0);
  nodes_.push_back(make_node(none, 0));
}

FTNode FTTree::make_node(const EdgeMask& A, int depth) {
  const Graph& g = ctx_.graph();
  const APSPTable& apsp = ctx_.apsp();
  auto& st = ctx_.stats();
  ++st.nodes_built;
  FTNode node;
  node.depth = depth;
  ExpathEngine eng(g, apsp);
  const ExpathStructure p = eng.shortest_expath(&A, a_, b_, 2 * ctx_.f() + 1, lambda_);
  if (p.empty()) return node;
  node.length = p.length;

  // Expand the labelled expath and remember where its items start and end.
  std::vector<Vertex> vs;
  std::vector<char> cut;
  auto append = [&](Vertex v, bool boundary) {
    vs.push_back(v);
    cut.push_back(boundary ? 1 : 0);
  };
  for (Vertex v : p.prefix) append(v, true);
  for (const auto& blk : p.blocks)
    for (const auto& it : blk.items) {
      if (it.kind == PathItem::Kind::Edge) {
        append(it.b, true);
      } else {
        auto path = apsp.path(it.a, it.b);
        for (std::size_t i = 1; i < path.size(); ++i) append(path[i], i + 1 == path.size());
      }
    }
  for (std::size_t i = 1; i < p.suffix.size(); ++i) append(p.suffix[i], true);
  const int m = static_cast<int>(vs.size()) - 1;
  std::vector<Dist> pre(m + 1, 0);
  for (int i = 1; i <= m; ++i) pre[i] = pre[i - 1] + 1;

  const auto net = compute_netpoints(pre, ctx_.eps(), lambda_);
  std::vector<char> is_net(m + 1, 0);
  for (int x : net) is_net[x] = 1;
  node.segments = std::max(0, static_cast<int>(net.size()) - 1);

  const auto& in_B = ctx_.pivots().in_B;
  int seg = 0, start = 0;
  for (int i = 1; i <= m; ++i) {
    if (!cut[i] && !is_net[i]) continue;
    FTPart part;
    part.v = vs[start];
    part.w = vs[i];
    part.d = static_cast<std::int32_t>(pre[i] - pre[start]);
    part.segment = seg;
    if (is_net[start]) part.flags |= FTPart::kVNet;
    if (is_net[i]) part.flags |= FTPart::kWNet;
    if (i - start > ctx_.L()) {
      part.flags |= FTPart::kLong;
      for (int q = start; q <= i; ++q)
        if (in_B[vs[q]]) {
          part.pivot = vs[q];
          break;
        }
      if (part.pivot == kNoVertex) ++st.missing_pivots;
    }
    node.parts.push_back(part);
    if (is_net[i]) ++seg;
    start = i;
  }

  // Segment-size bound: multi-edge segments are short relative to their
  // distance from both ends.
  const double total = static_cast<double>(pre[m]);
  for (std::size_t s = 0; s + 1 < net.size(); ++s) {
    const int x = net[s], y = net[s + 1];
    if (y - x < 2) continue;
    const double len = static_cast<double>(pre[y] - pre[x]);
    for (int q = x; q <= y; ++q) {
      ++st.segment_checks;
      const double near = std::min(static_cast<double>(pre[q]), total - static_cast<double>(pre[q]));
      if (len > ctx_.eps() / 36.0 * (near - lambda_) + 1e-9) ++st.segment_violations;
    }
  }
  if (depth < ctx_.f()) node.children.assign(node.segments, -1);
  return node;
}

void FTTree::add_segment_edges(const FTNode& node, int segment, EdgeMask& A) const {
  const Graph& g = ctx_.graph();
  for (const auto& part : node.parts) {
    if (part.segment != segment) continue;
    auto path = ctx_.apsp().path(part.v, part.w);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) A[*g.find_edge(path[i], path[i + 1])] = 1;
  }
}

std::int32_t FTTree::child(std::int32_t id, int segment, const EdgeMask& A_child) {
  std::int32_t c = nodes_[id].children[segment];
  if (c >= 0) return c;
  FTNode fresh = make_node(A_child, nodes_[id].depth + 1);
  c = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(std::move(fresh));
  nodes_[id].children[segment] = c;
  return c;
}

NodeCheck FTTree::node_check(const FTNode& node, const FailureSet& F, const ShortOracleFn& short_dso) const {
  NodeCheck r;
  if (node.empty()) return r;
  const Graph& g = ctx_.graph();
  if (!F.empty()) {
    for (const auto& part : node.parts) {
      if (part.is_long()) {
        if (part.pivot == kNoVertex) {
          r.segment = part.segment;
          return r;
        }
        const auto& tree = ctx_.pivot_tree(part.pivot);
        for (EdgeId e : F.edges)
          if (edge_on_canonical_path(tree, g, part.v, part.w, e)) {
            r.segment = part.segment;
            r.certified = true;
            return r;
          }
      } else if (short_dso(part.v, part.w) > 3 * static_cast<Dist>(part.d)) {
        r.segment = part.segment;
        auto path = ctx_.apsp().path(part.v, part.w);
        for (std::size_t i = 0; i + 1 < path.size() && !r.certified; ++i)
          r.certified = F.contains(*g.find_edge(path[i], path[i + 1]));
        return r;
      }
    }
  }
  r.ok = true;
  r.value = mul_sat(node.length, 3);
  return r;
}

namespace {

bool segment_has_pivots(const FTNode& node, int segment) {
  for (const auto& part : node.parts)
    if (part.segment == segment && part.is_long() && part.pivot == kNoVertex) return false;
  return true;
}

}  // namespace

Dist FTTree::query(const FailureSet& F, const ShortOracleFn& short_dso, int* visited, bool* sampling_failure) {
  std::lock_guard<std::mutex> lock(*mu_);
  auto& st = ctx_.stats();
  ++st.queries;
  EdgeMask A(ctx_.graph().m(), 0);
  std::int32_t id = 0;
  bool certified = true, failure = false;
  int count = 0;
  Dist result = kInf;
  while (true) {
    ++count;
    const FTNode& node = nodes_[id];
    if (node.empty()) break;
    if (node.depth == ctx_.f()) {
      if (certified) {
        result = node.length;
      } else {
        NodeCheck chk = node_check(node, F, short_dso);
        if (chk.ok) {
          result = chk.value;
        } else {
          ++st.uncertified_leaves;
          failure = true;
        }
      }
      break;
    }
    NodeCheck chk = node_check(node, F, short_dso);
    if (chk.ok) {
      result = chk.value;
      break;
    }
    certified = certified && chk.certified;
    if (!chk.certified && !segment_has_pivots(node, chk.segment)) failure = true;
    add_segment_edges(node, chk.segment, A);
    id = child(id, chk.segment, A);
  }
  std::int64_t prev = st.max_visited.load();
  while (count > prev && !st.max_visited.compare_exchange_weak(prev, count)) {
  }
  if (visited) *visited = count;
  if (sampling_failure) *sampling_failure = failure;
  return result;
}

void FTTree::build_all() {
  std::lock_guard<std::mutex> lock(*mu_);
  struct Item {
    std::int32_t id;
    EdgeMask A;
  };
  std::vector<Item> stack;
  stack.push_back({0, EdgeMask(ctx_.graph().m(), 0)});
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    const int segs = static_cast<int>(nodes_[it.id].children.size());
    for (int s = 0; s < segs; ++s) {
      EdgeMask A = it.A;
      add_segment_edges(nodes_[it.id], s, A);
      std::int32_t c = child(it.id, s, A);
      if (!nodes_[c].children.empty()) stack.push_back({c, std::move(A)});
    }
  }
}

std::size_t FTTree::node_count() const { return nodes_.size(); }

std::size_t FTTree::words() const {
  std::size_t w = 4;
  for (const auto& n : nodes_) w += n.words();
  return w;
}

}  // namespace ftdso
