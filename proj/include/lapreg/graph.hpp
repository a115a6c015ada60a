#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace lapreg {

/// 1-based vertex label.
using Vertex = std::uint32_t;

/// Undirected edge, always stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  Edge() = default;
  Edge(Vertex a, Vertex b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple, undirected, connected graph on vertices 1..n.
///
/// The constructor validates every invariant (no loops, no duplicate edges,
/// every label in range, one connected component) and throws GraphError
/// otherwise. A single isolated vertex is accepted as the trivial connected
/// graph, the unit of the cartesian product. Values are immutable.
class Graph {
 public:
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  /// Sorted lexicographically.
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const std::size_t> degrees() const noexcept { return degree_; }
  std::size_t degree(Vertex v) const;

  bool has_edge(Vertex a, Vertex b) const;

  /// Neighbour lists indexed by vertex - 1, each sorted ascending.
  std::vector<std::vector<Vertex>> adjacency() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> degree_;
};

Graph make_single_vertex();
Graph make_path(std::size_t n);
Graph make_ring(std::size_t n);
Graph make_complete(std::size_t m);

/// (g,h) ~ (g',h') iff g = g' and h ~ h', or h = h' and g ~ g'.
/// Pair (g,h) gets label (g-1)*|H| + h.
Graph cartesian_product(const Graph& g, const Graph& h);

Graph make_grid(std::size_t d, std::size_t side);
Graph make_torus(std::size_t d, std::size_t side);
/// path(n/2) x path(2).
Graph make_ladder(std::size_t n);
/// K_m on 1..m with a path on m+1..m+path_len hanging off vertex 1.
Graph make_lollipop(std::size_t m, std::size_t path_len);

Graph add_edge(const Graph& g, Vertex u, Vertex v);
Graph delete_edge(const Graph& g, Vertex u, Vertex v);
Graph add_pendant_vertex(const Graph& g, Vertex u);

/// Ring on n vertices; visiting vertices in order, each ring edge owned by the
/// current vertex (the lower endpoint, with {1,n} owned by 1) is moved with
/// probability p to a uniformly drawn new endpoint. Moves that would create a
/// loop or a duplicate edge are rejected and the edge stays. Returns the
/// largest connected component, relabelled in increasing label order.
Graph watts_strogatz(std::size_t n, double p, std::uint64_t seed);

struct EdgeListOptions {
  /// Keep the largest component instead of rejecting a disconnected file.
  bool largest_component = false;
};

/// One "id id" pair per line; '#' starts a comment. If every id is a positive
/// integer the ids are relabelled 1..n in numeric order, otherwise in order of
/// first appearance.
Graph read_edge_list(std::istream& in, EdgeListOptions opts = {});
Graph load_edge_list(const std::filesystem::path& path, EdgeListOptions opts = {});

void write_edge_list(const Graph& g, std::ostream& out);
void save_edge_list(const Graph& g, const std::filesystem::path& path);

namespace detail {

/// Component index for each vertex (0-based position), components numbered by
/// smallest member.
std::vector<std::size_t> component_labels(std::size_t n, std::span<const Edge> edges);

/// Largest component (ties: the one containing the smallest label),
/// relabelled preserving order.
Graph largest_component(std::size_t n, std::span<const Edge> edges);

}  // namespace detail

}  // namespace lapreg
