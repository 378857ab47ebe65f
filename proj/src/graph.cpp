#include "ftdso/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ftdso {

EdgeId Graph::add_edge(Vertex u, Vertex v, std::int32_t w) {
  if (u < 0 || v < 0 || u >= n() || v >= n()) throw GraphError("edge endpoint out of range");
  if (u == v) throw GraphError("self-loop at vertex " + std::to_string(u));
  if (w < 1) throw GraphError("edge weight must be positive");
  auto [it, fresh] = index_.emplace(key(u, v), m());
  if (!fresh) throw GraphError("duplicate edge {" + std::to_string(u) + "," + std::to_string(v) + "}");
  EdgeId id = m();
  edges_.push_back({u, v, w});
  adj_[u].push_back({v, id, w});
  adj_[v].push_back({u, id, w});
  max_w_ = std::max(max_w_, w);
  return id;
}

std::optional<EdgeId> Graph::find_edge(Vertex u, Vertex v) const {
  auto it = index_.find(key(u, v));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FailureSet::FailureSet(std::vector<EdgeId> es) : edges(std::move(es)) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

bool FailureSet::contains(EdgeId e) const { return std::binary_search(edges.begin(), edges.end(), e); }

std::vector<Vertex> FailureSet::endpoints(const Graph& g) const {
  std::vector<Vertex> out;
  for (EdgeId e : edges) {
    out.push_back(g.edge(e).u);
    out.push_back(g.edge(e).v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

EdgeMask FailureSet::mask(const Graph& g) const {
  EdgeMask m(g.m(), 0);
  for (EdgeId e : edges) m[e] = 1;
  return m;
}

void FailureSet::validate(const Graph& g, int f) const {
  for (EdgeId e : edges)
    if (e < 0 || e >= g.m()) throw GraphError("failure edge id " + std::to_string(e) + " does not exist");
  if (static_cast<int>(edges.size()) > f)
    throw GraphError("failure set of size " + std::to_string(edges.size()) + " exceeds f=" + std::to_string(f));
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw GraphError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

Graph load_dimacs(std::istream& in) {
  Graph g;
  bool have_header = false;
  long long declared_arcs = 0, arcs = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ss(line);
    char tag;
    ss >> tag;
    if (tag == 'p') {
      std::string kind;
      long long n, m;
      if (have_header) parse_fail(lineno, "second problem line");
      if (!(ss >> kind >> n >> m) || kind != "sp" || n < 0 || m < 0) parse_fail(lineno, "malformed problem line");
      g = Graph(static_cast<int>(n));
      declared_arcs = m;
      have_header = true;
    } else if (tag == 'a') {
      if (!have_header) parse_fail(lineno, "arc before problem line");
      long long u, v, w;
      if (!(ss >> u >> v >> w)) parse_fail(lineno, "malformed arc line");
      if (u < 1 || v < 1 || u > g.n() || v > g.n()) parse_fail(lineno, "vertex id out of range");
      if (w < 1 || w > std::numeric_limits<std::int32_t>::max()) parse_fail(lineno, "weight out of range");
      ++arcs;
      Vertex a = static_cast<Vertex>(u - 1), b = static_cast<Vertex>(v - 1);
      if (a == b) parse_fail(lineno, "self-loop");
      if (auto e = g.find_edge(a, b)) {
        const Edge& ed = g.edge(*e);
        // the reverse arc of an undirected edge is folded into it
        if (ed.u == b && ed.v == a && ed.w == w) continue;
        parse_fail(lineno, "duplicate edge");
      }
      g.add_edge(a, b, static_cast<std::int32_t>(w));
    } else {
      parse_fail(lineno, std::string("unknown line tag '") + tag + "'");
    }
  }
  if (!have_header) throw GraphError("missing problem line");
  if (arcs != declared_arcs)
    throw GraphError("expected " + std::to_string(declared_arcs) + " arcs, found " + std::to_string(arcs));
  return g;
}

Graph parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_dimacs(in);
}

Graph load_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open " + path);
  return load_dimacs(in);
}

void write_dimacs(const Graph& g, std::ostream& out) {
  out << "p sp " << g.n() << ' ' << g.m() << '\n';
  for (const Edge& e : g.edges()) out << "a " << e.u + 1 << ' ' << e.v + 1 << ' ' << e.w << '\n';
}

}  // namespace ftdso
