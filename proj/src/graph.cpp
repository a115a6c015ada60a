#include "lapreg/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>

#include "lapreg/error.hpp"

namespace lapreg {

const char* to_string(GraphErrc code) noexcept {
  switch (code) {
    case GraphErrc::invalid_size: return "invalid-size";
    case GraphErrc::self_loop: return "self-loop";
    case GraphErrc::duplicate_edge: return "duplicate-edge";
    case GraphErrc::missing_edge: return "missing-edge";
    case GraphErrc::would_disconnect: return "would-disconnect";
    case GraphErrc::unknown_vertex: return "unknown-vertex";
    case GraphErrc::disconnected: return "disconnected";
    case GraphErrc::parse: return "parse";
  }
  return "graph-error";
}

namespace {

void require_size(bool ok, const std::string& what) {
  if (!ok) throw GraphError(GraphErrc::invalid_size, what);
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;  // root is always the smallest member
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

namespace detail {

std::vector<std::size_t> component_labels(std::size_t n, std::span<const Edge> edges) {
  DisjointSets sets(n);
  for (const auto& e : edges) sets.unite(e.u - 1, e.v - 1);
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = sets.find(i);
  return label;
}

Graph largest_component(std::size_t n, std::span<const Edge> edges) {
  const auto label = component_labels(n, edges);
  std::vector<std::size_t> size(n, 0);
  for (auto root : label) ++size[root];
  std::size_t best = 0;
  for (std::size_t root = 0; root < n; ++root)
    if (size[root] > size[best]) best = root;

  std::vector<Vertex> relabel(n, 0);
  Vertex next = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (label[i] == best) relabel[i] = ++next;

  std::vector<Edge> kept;
  for (const auto& e : edges)
    if (label[e.u - 1] == best) kept.emplace_back(relabel[e.u - 1], relabel[e.v - 1]);
  return Graph(next, std::move(kept));
}

}  // namespace detail

Graph::Graph(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)), degree_(n, 0) {
  if (n_ == 0) throw GraphError(GraphErrc::invalid_size, "graph needs at least one vertex");
  for (auto& e : edges_) {
    e = Edge(e.u, e.v);
    if (e.u == e.v)
      throw GraphError(GraphErrc::self_loop, "loop at vertex " + std::to_string(e.u));
    if (e.u < 1 || e.v > n_)
      throw GraphError(GraphErrc::unknown_vertex, "edge {" + std::to_string(e.u) + "," +
                                                      std::to_string(e.v) + "} outside 1.." +
                                                      std::to_string(n_));
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end())
    throw GraphError(GraphErrc::duplicate_edge,
                     "{" + std::to_string(dup->u) + "," + std::to_string(dup->v) + "}");
  for (const auto& e : edges_) {
    ++degree_[e.u - 1];
    ++degree_[e.v - 1];
  }
  const auto label = detail::component_labels(n_, edges_);
  if (std::any_of(label.begin(), label.end(), [](auto l) { return l != 0; }))
    throw GraphError(GraphErrc::disconnected, "graph has more than one component");
}

std::size_t Graph::degree(Vertex v) const {
  if (v < 1 || v > n_) throw GraphError(GraphErrc::unknown_vertex, std::to_string(v));
  return degree_[v - 1];
}

bool Graph::has_edge(Vertex a, Vertex b) const {
  if (a == b) return false;
  return std::binary_search(edges_.begin(), edges_.end(), Edge(a, b));
}

std::vector<std::vector<Vertex>> Graph::adjacency() const {
  std::vector<std::vector<Vertex>> adj(n_);
  for (std::size_t i = 0; i < n_; ++i) adj[i].reserve(degree_[i]);
  for (const auto& e : edges_) {
    adj[e.u - 1].push_back(e.v);
    adj[e.v - 1].push_back(e.u);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

Graph make_single_vertex() { return Graph(1, {}); }

Graph make_path(std::size_t n) {
  require_size(n >= 2, "path needs n >= 2, got " + std::to_string(n));
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (Vertex i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, std::move(edges));
}

Graph make_ring(std::size_t n) {
  require_size(n >= 3, "ring needs n >= 3, got " + std::to_string(n));
  std::vector<Edge> edges;
  edges.reserve(n);
  for (Vertex i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(1, static_cast<Vertex>(n));
  return Graph(n, std::move(edges));
}

Graph make_complete(std::size_t m) {
  require_size(m >= 2, "complete graph needs m >= 2, got " + std::to_string(m));
  std::vector<Edge> edges;
  edges.reserve(m * (m - 1) / 2);
  for (Vertex i = 1; i <= m; ++i)
    for (Vertex j = i + 1; j <= m; ++j) edges.emplace_back(i, j);
  return Graph(m, std::move(edges));
}

Graph cartesian_product(const Graph& g, const Graph& h) {
  const std::size_t n = g.num_vertices();
  const std::size_t m = h.num_vertices();
  auto label = [m](Vertex a, Vertex b) { return static_cast<Vertex>((a - 1) * m + b); };
  std::vector<Edge> edges;
  edges.reserve(n * h.num_edges() + m * g.num_edges());
  for (Vertex a = 1; a <= n; ++a)
    for (const auto& e : h.edges()) edges.emplace_back(label(a, e.u), label(a, e.v));
  for (const auto& e : g.edges())
    for (Vertex b = 1; b <= m; ++b) edges.emplace_back(label(e.u, b), label(e.v, b));
  return Graph(n * m, std::move(edges));
}

Graph make_grid(std::size_t d, std::size_t side) {
  require_size(d >= 1 && side >= 2, "grid needs d >= 1 and side >= 2");
  Graph out = make_path(side);
  for (std::size_t k = 1; k < d; ++k) out = cartesian_product(out, make_path(side));
  return out;
}

Graph make_torus(std::size_t d, std::size_t side) {
  require_size(d >= 1 && side >= 3, "torus needs d >= 1 and side >= 3");
  Graph out = make_ring(side);
  for (std::size_t k = 1; k < d; ++k) out = cartesian_product(out, make_ring(side));
  return out;
}

Graph make_ladder(std::size_t n) {
  require_size(n >= 4 && n % 2 == 0, "ladder needs an even n >= 4, got " + std::to_string(n));
  return cartesian_product(make_path(n / 2), make_path(2));
}

Graph make_lollipop(std::size_t m, std::size_t path_len) {
  require_size(m >= 3 && path_len >= 1, "lollipop needs m >= 3 and path_len >= 1");
  const Graph clique = make_complete(m);
  std::vector<Edge> edges(clique.edges().begin(), clique.edges().end());
  edges.emplace_back(1, static_cast<Vertex>(m + 1));
  for (std::size_t k = m + 1; k < m + path_len; ++k)
    edges.emplace_back(static_cast<Vertex>(k), static_cast<Vertex>(k + 1));
  return Graph(m + path_len, std::move(edges));
}

namespace {

void require_vertex(const Graph& g, Vertex v) {
  if (v < 1 || v > g.num_vertices())
    throw GraphError(GraphErrc::unknown_vertex,
                     std::to_string(v) + " not in 1.." + std::to_string(g.num_vertices()));
}

void require_distinct(Vertex u, Vertex v) {
  if (u == v) throw GraphError(GraphErrc::self_loop, "u == v == " + std::to_string(u));
}

}  // namespace

Graph add_edge(const Graph& g, Vertex u, Vertex v) {
  require_vertex(g, u);
  require_vertex(g, v);
  require_distinct(u, v);
  if (g.has_edge(u, v))
    throw GraphError(GraphErrc::duplicate_edge,
                     "{" + std::to_string(u) + "," + std::to_string(v) + "} already present");
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  edges.emplace_back(u, v);
  return Graph(g.num_vertices(), std::move(edges));
}

Graph delete_edge(const Graph& g, Vertex u, Vertex v) {
  require_vertex(g, u);
  require_vertex(g, v);
  require_distinct(u, v);
  if (!g.has_edge(u, v))
    throw GraphError(GraphErrc::missing_edge,
                     "{" + std::to_string(u) + "," + std::to_string(v) + "} not present");
  std::vector<Edge> edges;
  edges.reserve(g.num_edges() - 1);
  const Edge gone(u, v);
  for (const auto& e : g.edges())
    if (e != gone) edges.push_back(e);
  const auto label = detail::component_labels(g.num_vertices(), edges);
  if (std::any_of(label.begin(), label.end(), [](auto l) { return l != 0; }))
    throw GraphError(GraphErrc::would_disconnect,
                     "removing {" + std::to_string(u) + "," + std::to_string(v) + "}");
  return Graph(g.num_vertices(), std::move(edges));
}

Graph add_pendant_vertex(const Graph& g, Vertex u) {
  require_vertex(g, u);
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  edges.emplace_back(u, static_cast<Vertex>(g.num_vertices() + 1));
  return Graph(g.num_vertices() + 1, std::move(edges));
}

Graph watts_strogatz(std::size_t n, double p, std::uint64_t seed) {
  require_size(n >= 3, "watts_strogatz needs n >= 3, got " + std::to_string(n));
  if (!(p >= 0.0 && p <= 1.0))
    throw ValidationError("watts_strogatz: rewiring probability must lie in [0,1]");

  std::set<Edge> edges;
  for (Vertex i = 1; i < n; ++i) edges.emplace(i, i + 1);
  edges.emplace(1, static_cast<Vertex>(n));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<Vertex> pick(1, static_cast<Vertex>(n));

  auto rewire = [&](Vertex from, Vertex old_end) {
    if (!(coin(rng) < p)) return;
    const Vertex target = pick(rng);
    if (target == from || edges.contains(Edge(from, target))) return;
    edges.erase(Edge(from, old_end));
    edges.emplace(from, target);
  };

  for (Vertex v = 1; v <= n; ++v) {
    if (v < n) rewire(v, v + 1);
    if (v == 1) rewire(1, static_cast<Vertex>(n));
  }

  const std::vector<Edge> flat(edges.begin(), edges.end());
  return detail::largest_component(n, flat);
}

Graph read_edge_list(std::istream& in, EdgeListOptions opts) {
  struct RawEdge {
    std::string a, b;
    std::size_t line;
  };
  std::vector<RawEdge> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra))
      throw GraphError(GraphErrc::parse,
                       "line " + std::to_string(lineno) + ": expected exactly two vertex ids");
    raw.push_back({a, b, lineno});
  }
  if (raw.empty()) throw GraphError(GraphErrc::parse, "edge list is empty");

  auto as_positive = [](const std::string& s) -> std::optional<std::uint64_t> {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || value == 0) return std::nullopt;
    return value;
  };
  bool numeric = true;
  for (const auto& e : raw)
    if (!as_positive(e.a) || !as_positive(e.b)) {
      numeric = false;
      break;
    }

  std::unordered_map<std::string, Vertex> label;
  if (numeric) {
    std::map<std::uint64_t, std::string> ordered;
    for (const auto& e : raw) {
      ordered.emplace(*as_positive(e.a), e.a);
      ordered.emplace(*as_positive(e.b), e.b);
    }
    Vertex next = 0;
    for (const auto& [value, text] : ordered) label.emplace(text, ++next);
    // "01" and "1" name the same vertex
    for (const auto& e : raw) {
      label.emplace(e.a, label.at(ordered.at(*as_positive(e.a))));
      label.emplace(e.b, label.at(ordered.at(*as_positive(e.b))));
    }
  } else {
    Vertex next = 0;
    for (const auto& e : raw) {
      if (!label.contains(e.a)) label.emplace(e.a, ++next);
      if (!label.contains(e.b)) label.emplace(e.b, ++next);
    }
  }

  std::set<Edge> seen;
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) {
    const Vertex u = label.at(e.a);
    const Vertex v = label.at(e.b);
    if (u == v)
      throw GraphError(GraphErrc::parse, "line " + std::to_string(e.line) + ": self-loop");
    if (!seen.emplace(u, v).second)
      throw GraphError(GraphErrc::parse, "line " + std::to_string(e.line) + ": duplicate edge");
    edges.emplace_back(u, v);
  }

  std::size_t n = 0;
  for (const auto& [text, v] : label) n = std::max<std::size_t>(n, v);
  if (opts.largest_component) return detail::largest_component(n, edges);
  return Graph(n, std::move(edges));
}

Graph load_edge_list(const std::filesystem::path& path, EdgeListOptions opts) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open edge list " + path.string());
  return read_edge_list(in, opts);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write edge list " + path.string());
  write_edge_list(g, out);
  if (!out) throw ValidationError("write failed for " + path.string());
}

}  // namespace lapreg
