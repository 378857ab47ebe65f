#include "ftdso/generators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ftdso/rng.hpp"

namespace ftdso {

Graph make_er(int n, double p, std::uint64_t seed) {
  Rng rng(seed);
  Graph g(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) g.add_edge(u, v);
  return g;
}

Graph make_grid(int w, int h) {
  Graph g(w * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Vertex v = y * w + x;
      if (x + 1 < w) g.add_edge(v, v + 1);
      if (y + 1 < h) g.add_edge(v, v + w);
    }
  return g;
}

Graph make_rgg(int n, double r, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = rng.uniform();
    ys[i] = rng.uniform();
  }
  Graph g(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      double dx = xs[u] - xs[v], dy = ys[u] - ys[v];
      if (dx * dx + dy * dy <= r * r) g.add_edge(u, v);
    }
  return g;
}

Graph make_path(int n) {
  Graph g(n);
  for (Vertex v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
  return g;
}

Graph make_cycle(int n) {
  Graph g = make_path(n);
  if (n >= 3) g.add_edge(n - 1, 0);
  return g;
}

namespace {

std::vector<int> component_ids(const Graph& g, int& count) {
  std::vector<int> comp(g.n(), -1);
  count = 0;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < g.n(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      for (const Arc& a : g.neighbors(u))
        if (comp[a.to] < 0) {
          comp[a.to] = count;
          stack.push_back(a.to);
        }
    }
    ++count;
  }
  return comp;
}

}  // namespace

bool is_connected(const Graph& g) {
  int c;
  component_ids(g, c);
  return c <= 1;
}

Graph largest_component(const Graph& g) {
  int count;
  auto comp = component_ids(g, count);
  if (count <= 1) return g;
  std::vector<int> sizes(count, 0);
  for (int c : comp) ++sizes[c];
  int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<Vertex> relabel(g.n(), kNoVertex);
  int k = 0;
  for (Vertex v = 0; v < g.n(); ++v)
    if (comp[v] == best) relabel[v] = k++;
  Graph out(k);
  for (const Edge& e : g.edges())
    if (comp[e.u] == best) out.add_edge(relabel[e.u], relabel[e.v], e.w);
  return out;
}

Graph generate_from_spec(const std::string& spec, std::uint64_t seed, bool connected_only) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto bad = [&]() { return GraphError("invalid generator spec '" + spec + "'"); };
  if (parts.size() != 3) throw bad();
  Graph g;
  try {
    if (parts[0] == "er") {
      int n = std::stoi(parts[1]);
      double p = std::stod(parts[2]);
      if (n < 0 || p < 0 || p > 1) throw bad();
      g = make_er(n, p, seed);
    } else if (parts[0] == "grid") {
      int w = std::stoi(parts[1]), h = std::stoi(parts[2]);
      if (w < 0 || h < 0) throw bad();
      g = make_grid(w, h);
    } else if (parts[0] == "rgg") {
      int n = std::stoi(parts[1]);
      double r = std::stod(parts[2]);
      if (n < 0 || r < 0) throw bad();
      g = make_rgg(n, r, seed);
    } else {
      throw bad();
    }
  } catch (const std::logic_error&) {
    throw bad();
  }
  return connected_only ? largest_component(g) : g;
}

}  // namespace ftdso
