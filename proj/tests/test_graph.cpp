#include <doctest.h>

#include <random>
#include <sstream>

#include "lapreg/error.hpp"
#include "lapreg/graph.hpp"
#include "oracles.hpp"

using namespace lapreg;

namespace {

GraphErrc error_code(auto&& fn) {
  try {
    fn();
  } catch (const GraphError& e) {
    return e.code();
  }
  FAIL("expected a GraphError");
  return GraphErrc::parse;
}

std::vector<Edge> edge_vec(const Graph& g) { return {g.edges().begin(), g.edges().end()}; }

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("path graphs") {
    const Graph p2 = make_path(2);
    CHECK(p2.num_vertices() == 2);
    CHECK(edge_vec(p2) == std::vector<Edge>{{1, 2}});

    const Graph p3 = make_path(3);
    CHECK(edge_vec(p3) == std::vector<Edge>{{1, 2}, {2, 3}});
    CHECK(p3.degree(2) == 2);
    CHECK(error_code([] { make_path(1); }) == GraphErrc::invalid_size);
  }

  TEST_CASE("ring and complete graphs") {
    CHECK(make_ring(4).num_edges() == 4);
    CHECK(make_complete(5).num_edges() == 10);
    CHECK(make_complete(2) == make_path(2));
    CHECK(error_code([] { make_ring(2); }) == GraphErrc::invalid_size);
    CHECK(error_code([] { make_complete(1); }) == GraphErrc::invalid_size);
  }

  TEST_CASE("graph constructor enforces the invariants") {
    CHECK(error_code([] { Graph(3, {{1, 1}, {1, 2}, {2, 3}}); }) == GraphErrc::self_loop);
    CHECK(error_code([] { Graph(3, {{1, 2}, {2, 1}, {2, 3}}); }) == GraphErrc::duplicate_edge);
    CHECK(error_code([] { Graph(3, {{1, 2}, {2, 4}}); }) == GraphErrc::unknown_vertex);
    CHECK(error_code([] { Graph(4, {{1, 2}, {3, 4}}); }) == GraphErrc::disconnected);
    CHECK(error_code([] { Graph(3, {{1, 2}}); }) == GraphErrc::disconnected);
  }

  TEST_CASE("cartesian product") {
    const Graph square = cartesian_product(make_path(2), make_path(2));
    CHECK(square.num_vertices() == 4);
    CHECK(square.num_edges() == 4);
    for (Vertex v = 1; v <= 4; ++v) CHECK(square.degree(v) == 2);

    CHECK(cartesian_product(make_path(5), make_path(2)) == make_ladder(10));
    CHECK(cartesian_product(make_lollipop(4, 3), make_single_vertex()) == make_lollipop(4, 3));
    CHECK(cartesian_product(make_single_vertex(), make_ring(5)) == make_ring(5));
  }

  TEST_CASE("product counts on random graphs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      std::uniform_int_distribution<std::size_t> size(2, 8);
      const Graph g = oracle::random_connected_graph(size(rng), 0.3, rng);
      const Graph h = oracle::random_connected_graph(size(rng), 0.3, rng);
      const Graph gh = cartesian_product(g, h);
      CHECK(gh.num_vertices() == g.num_vertices() * h.num_vertices());
      CHECK(gh.num_edges() ==
            g.num_vertices() * h.num_edges() + h.num_vertices() * g.num_edges());
    }
  }

  TEST_CASE("grids, tori, ladders, lollipops") {
    const Graph grid = make_grid(2, 20);
    CHECK(grid.num_vertices() == 400);
    CHECK(grid.num_edges() == 760);
    CHECK(make_grid(1, 7) == make_path(7));
    CHECK(make_grid(3, 3).num_edges() == 3 * 9 * 2);
    CHECK(make_torus(1, 9) == make_ring(9));
    CHECK(make_torus(2, 5).num_edges() == 50);
    CHECK(make_ladder(8).num_edges() == 10);

    const Graph lolli = make_lollipop(3, 2);
    CHECK(lolli.num_vertices() == 5);
    CHECK(lolli.num_edges() == 5);

    CHECK(error_code([] { make_ladder(7); }) == GraphErrc::invalid_size);
    CHECK(error_code([] { make_torus(2, 2); }) == GraphErrc::invalid_size);
    CHECK(error_code([] { make_lollipop(2, 3); }) == GraphErrc::invalid_size);
    CHECK(error_code([] { make_grid(0, 3); }) == GraphErrc::invalid_size);
  }

  TEST_CASE("edge surgery") {
    CHECK(error_code([] { delete_edge(make_path(3), 1, 2); }) == GraphErrc::would_disconnect);
    CHECK(add_edge(make_path(3), 1, 3) == make_ring(3));
    CHECK(add_pendant_vertex(make_complete(3), 1) == make_lollipop(3, 1));
    CHECK(delete_edge(make_ring(6), 3, 4) == Graph(6, {{1, 2}, {2, 3}, {4, 5}, {5, 6}, {1, 6}}));

    CHECK(error_code([] { add_edge(make_path(3), 1, 2); }) == GraphErrc::duplicate_edge);
    CHECK(error_code([] { delete_edge(make_ring(5), 1, 3); }) == GraphErrc::missing_edge);
    CHECK(error_code([] { add_edge(make_path(3), 1, 9); }) == GraphErrc::unknown_vertex);
    CHECK(error_code([] { add_edge(make_path(3), 2, 2); }) == GraphErrc::self_loop);
    CHECK(error_code([] { add_pendant_vertex(make_path(3), 0); }) == GraphErrc::unknown_vertex);
  }

  TEST_CASE("add then delete the same edge is the identity") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const Graph g = oracle::random_connected_graph(9, 0.2, rng);
      std::uniform_int_distribution<Vertex> pick(1, 9);
      Vertex u = pick(rng), v = pick(rng);
      if (u == v || g.has_edge(u, v)) continue;
      CHECK(delete_edge(add_edge(g, u, v), u, v) == g);
    }
  }

  TEST_CASE("watts-strogatz") {
    CHECK(watts_strogatz(30, 0.0, 1) == make_ring(30));
    CHECK(watts_strogatz(10, 1.0, 42) == watts_strogatz(10, 1.0, 42));
    CHECK(watts_strogatz(200, 0.25, 7) == watts_strogatz(200, 0.25, 7));
    CHECK_THROWS_AS(watts_strogatz(10, 1.5, 1), ValidationError);
    CHECK(error_code([] { watts_strogatz(2, 0.5, 1); }) == GraphErrc::invalid_size);

    // a realization keeps most of the ring; the figure's draw kept 175 of 200
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const Graph g = watts_strogatz(200, 0.25, seed);
      CHECK(g.num_vertices() <= 200);
      CHECK(g.num_edges() >= g.num_vertices() - 1);
      total += static_cast<double>(g.num_vertices());
    }
    const double mean_size = total / 40.0;
    MESSAGE("mean largest component of ws(200, 1/4): " << mean_size);
    CHECK(mean_size > 140.0);
    CHECK(mean_size < 200.0);
  }

  TEST_CASE("edge list reading") {
    std::istringstream simple("1 2\n2 3\n");
    CHECK(read_edge_list(simple) == make_path(3));

    std::istringstream names("# proteins\nA B\nB C  # trailing\n\nC A\n");
    CHECK(read_edge_list(names) == make_ring(3));

    std::istringstream gaps("10 30\n30 20\n");
    CHECK(read_edge_list(gaps) == Graph(3, {{1, 3}, {3, 2}}));

    std::istringstream duplicate("1 2\n2 3\n3 2\n");
    try {
      read_edge_list(duplicate);
      FAIL("duplicate edge accepted");
    } catch (const GraphError& e) {
      CHECK(e.code() == GraphErrc::parse);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    std::istringstream malformed("1 2\n2\n");
    CHECK(error_code([&] { read_edge_list(malformed); }) == GraphErrc::parse);
    std::istringstream loop("1 1\n");
    CHECK(error_code([&] { read_edge_list(loop); }) == GraphErrc::parse);

    std::istringstream split("1 2\n2 3\n4 5\n");
    CHECK(error_code([&] { read_edge_list(split); }) == GraphErrc::disconnected);
    std::istringstream split2("1 2\n2 3\n4 5\n");
    CHECK(read_edge_list(split2, {.largest_component = true}) == make_path(3));
  }

  TEST_CASE("edge list round trip") {
    const auto dir = std::filesystem::temp_directory_path();
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const Graph g = oracle::random_connected_graph(15, 0.15, rng);
      const auto path = dir / ("lapreg_roundtrip_" + std::to_string(trial) + ".txt");
      save_edge_list(g, path);
      CHECK(load_edge_list(path) == g);
      std::filesystem::remove(path);
    }
    const auto path = dir / "lapreg_grid.txt";
    save_edge_list(make_grid(2, 20), path);
    CHECK(load_edge_list(path).num_edges() == 760);
    std::filesystem::remove(path);
  }
}
