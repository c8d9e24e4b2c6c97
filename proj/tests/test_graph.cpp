#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "netres/csv.hpp"
#include "netres/graph.hpp"
#include "netres/rng.hpp"
#include "test_util.hpp"

using namespace netres;

TEST_CASE("parse_edge_list: single edge") {
  const WeightedDigraph g = parse_edge_list("src,dst,weight\nA,B,2.0");
  REQUIRE(g.node_count() == 2);
  REQUIRE(g.edge_count() == 1);
  CHECK(g.nodes[0].id == "A");
  CHECK(g.nodes[1].id == "B");
  CHECK(g.edges[0].src == 0);
  CHECK(g.edges[0].dst == 1);
  CHECK(g.edges[0].weight == 2.0);
}

TEST_CASE("parse_edge_list: opposing directions with different weights") {
  const WeightedDigraph g = parse_edge_list("src,dst,weight\nA,B,1\nB,A,3");
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edges[0].weight == 1.0);
  CHECK(g.edges[1].weight == 3.0);
  CHECK(g.edges[0].src == g.edges[1].dst);
  CHECK(g.edges[0].dst == g.edges[1].src);
}

TEST_CASE("parse_edge_list: rejects bad input") {
  CHECK_THROWS_WITH_AS(parse_edge_list("src,dst,weight\nA,B,-1"),
                       doctest::Contains("nonnegative"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_edge_list("src,dst,weight\nA,B,nan"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_edge_list("src,dst,weight\nA,B,inf"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_edge_list("src,dst,weight\nA,B"),
                       doctest::Contains("3 fields"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_edge_list("src,dst,weight\nA,B,1\nC,D,2\nA,B,5"),
                       doctest::Contains("line 4"), std::runtime_error);
  CHECK_THROWS_AS(parse_edge_list("src;dst;weight\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_edge_list(""), std::runtime_error);
}

TEST_CASE("parse_edge_list: CRLF, blank lines and self-loops accepted") {
  const WeightedDigraph g = parse_edge_list("src,dst,weight\r\nA,A,5\r\n\r\nA,B,0\r\n");
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edges[0].src == g.edges[0].dst);
  CHECK(g.edges[1].weight == 0.0);
}

TEST_CASE("parse_node_metadata attaches coordinates") {
  const WeightedDigraph g = parse_edge_list("src,dst,weight\nA,B,2.0");

  SUBCASE("matching node") {
    const MetadataResult r = parse_node_metadata("id,lon,lat\nA,10.75,59.91", g);
    CHECK(r.unmatched_rows == 0);
    REQUIRE(r.graph.nodes[0].lon.has_value());
    CHECK(*r.graph.nodes[0].lon == 10.75);
    CHECK(*r.graph.nodes[0].lat == 59.91);
    CHECK(!r.graph.nodes[1].lon.has_value());
  }
  SUBCASE("empty body leaves the graph unchanged") {
    const MetadataResult r = parse_node_metadata("id,lon,lat\n", g);
    CHECK(r.graph == g);
    CHECK(r.unmatched_rows == 0);
  }
  SUBCASE("unknown node counts as a warning") {
    const MetadataResult r = parse_node_metadata("id,lon,lat\nZ,1,2", g);
    CHECK(r.graph == g);
    CHECK(r.unmatched_rows == 1);
  }
  SUBCASE("malformed row") {
    CHECK_THROWS_WITH_AS(parse_node_metadata("id,lon,lat\nA,x,2", g),
                         doctest::Contains("line 2"), std::runtime_error);
  }
}

TEST_CASE("degrees: single edge and empty graph") {
  const DegreeTable t = degrees(parse_edge_list("src,dst,weight\nA,B,2.0"));
  CHECK(t.per_node[0].out_degree == 1);
  CHECK(t.per_node[0].out_strength == 2.0);
  CHECK(t.per_node[0].in_degree == 0);
  CHECK(t.per_node[1].in_degree == 1);
  CHECK(t.per_node[1].in_strength == 2.0);
  CHECK(t.per_node[1].out_degree == 0);

  CHECK(degrees(WeightedDigraph{}).per_node.empty());
}

TEST_CASE("degrees: self-loop counts on both sides") {
  // A->B(1), B->A(3), B->B(5): hand count over the edge list gives
  // B: incoming {1,5}, outgoing {3,5}.
  const WeightedDigraph g = parse_edge_list("src,dst,weight\nA,B,1\nB,A,3\nB,B,5");
  const DegreeTable t = degrees(g);
  CHECK(t.per_node[1].in_degree == 2);
  CHECK(t.per_node[1].out_degree == 2);
  CHECK(t.per_node[1].in_strength == 6.0);
  CHECK(t.per_node[1].out_strength == 8.0);
  CHECK(t.per_node[0].in_strength == 3.0);
}

TEST_CASE("degrees: strength totals reproduce the edge-list accumulation order") {
  Rng rng(99);
  for (int iter = 0; iter < 50; ++iter) {
    const WeightedDigraph g = testutil::random_graph(rng);
    const DegreeTable t = degrees(g);

    std::size_t in_total = 0, out_total = 0;
    for (const NodeDegrees& d : t.per_node) {
      in_total += d.in_degree;
      out_total += d.out_degree;
    }
    CHECK(in_total == g.edge_count());
    CHECK(out_total == g.edge_count());

    // per-node accumulators filled in edge-list order, totalled in node
    // order: must agree bit-exactly with the table
    std::vector<double> out_strength(g.node_count(), 0.0);
    for (const Edge& e : g.edges) out_strength[e.src] += e.weight;
    double grouped = 0.0, table_total = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      grouped += out_strength[i];
      table_total += t.per_node[i].out_strength;
    }
    CHECK(grouped == table_total);

    double flat = 0.0;
    for (const Edge& e : g.edges) flat += e.weight;
    CHECK(table_total == doctest::Approx(flat).epsilon(1e-12));
  }
}

TEST_CASE("delete_nodes") {
  SUBCASE("middle of a chain") {
    const WeightedDigraph g = parse_edge_list("src,dst,weight\nA,B,1\nB,C,1");
    const WeightedDigraph out = delete_nodes(g, {1});
    REQUIRE(out.node_count() == 2);
    CHECK(out.nodes[0].id == "A");
    CHECK(out.nodes[1].id == "C");
    CHECK(out.edge_count() == 0);
  }
  SUBCASE("empty set is the identity") {
    const WeightedDigraph g = parse_edge_list("src,dst,weight\nA,B,1\nB,A,3");
    CHECK(delete_nodes(g, {}) == g);
  }
  SUBCASE("surviving self-loop") {
    const WeightedDigraph g = parse_edge_list("src,dst,weight\nA,B,1\nB,A,3\nB,B,5");
    const WeightedDigraph out = delete_nodes(g, {0});
    REQUIRE(out.node_count() == 1);
    CHECK(out.nodes[0].id == "B");
    REQUIRE(out.edge_count() == 1);
    CHECK(out.edges[0] == Edge{0, 0, 5.0});
  }
  SUBCASE("unknown index") {
    const WeightedDigraph g = parse_edge_list("src,dst,weight\nA,B,1");
    CHECK_THROWS_AS(delete_nodes(g, {7}), std::runtime_error);
  }
  SUBCASE("no edge references a deleted node") {
    Rng rng(7);
    for (int iter = 0; iter < 30; ++iter) {
      const WeightedDigraph g = testutil::random_graph(rng);
      std::vector<std::size_t> doomed;
      for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (rng.uniform01() < 0.3) doomed.push_back(i);
      }
      const WeightedDigraph out = delete_nodes(g, doomed);
      CHECK(out.node_count() == g.node_count() - doomed.size());
      std::set<std::string> gone;
      for (std::size_t i : doomed) gone.insert(g.nodes[i].id);
      for (const Edge& e : out.edges) {
        CHECK(!gone.contains(out.nodes[e.src].id));
        CHECK(!gone.contains(out.nodes[e.dst].id));
      }
    }
  }
}

TEST_CASE("rewire_null_model: swap_factor 0 is the identity") {
  const WeightedDigraph g = parse_edge_list("src,dst,weight\nA,B,1\nB,C,2\nC,A,3");
  CHECK(rewire_null_model(g, 123, 0) == g);
}

TEST_CASE("rewire_null_model: needs two non-self-loop edges") {
  const WeightedDigraph g = parse_edge_list("src,dst,weight\nA,A,1\nB,B,2\nA,B,3");
  CHECK_THROWS_AS(rewire_null_model(g, 1, 10), std::runtime_error);
}

TEST_CASE("rewire_null_model: degrees and weight multiset preserved") {
  Rng rng(2024);
  for (int iter = 0; iter < 100; ++iter) {
    const WeightedDigraph g = testutil::random_graph(rng);
    std::size_t non_loops = 0;
    for (const Edge& e : g.edges) {
      if (e.src != e.dst) ++non_loops;
    }
    if (non_loops < 2) continue;
    const WeightedDigraph out = rewire_null_model(g, rng.next_u64(), 10);

    const DegreeTable before = degrees(g);
    const DegreeTable after = degrees(out);
    REQUIRE(before.per_node.size() == after.per_node.size());
    for (std::size_t i = 0; i < before.per_node.size(); ++i) {
      CHECK(before.per_node[i].in_degree == after.per_node[i].in_degree);
      CHECK(before.per_node[i].out_degree == after.per_node[i].out_degree);
    }

    std::vector<double> w1, w2;
    for (const Edge& e : g.edges) w1.push_back(e.weight);
    for (const Edge& e : out.edges) w2.push_back(e.weight);
    std::sort(w1.begin(), w1.end());
    std::sort(w2.begin(), w2.end());
    CHECK(w1 == w2);

    // self-loops survive untouched, no duplicate pairs appear
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t loops_before = 0, loops_after = 0;
    for (const Edge& e : g.edges) loops_before += e.src == e.dst;
    for (const Edge& e : out.edges) {
      loops_after += e.src == e.dst;
      CHECK(pairs.insert({e.src, e.dst}).second);
    }
    CHECK(loops_before == loops_after);
  }
}

TEST_CASE("rewire_null_model: matches the reference swap implementation") {
  const WeightedDigraph cycle =
      parse_edge_list("src,dst,weight\nA,B,1\nB,C,2\nC,D,3\nD,A,4");
  for (std::uint64_t seed : {1ull, 7ull, 99ull}) {
    const WeightedDigraph out = rewire_null_model(cycle, seed, 10);
    CHECK(out.edges == testutil::reference_rewire(cycle, seed, 10));
    CHECK(out.nodes == cycle.nodes);
  }
  Rng rng(5);
  for (int iter = 0; iter < 20; ++iter) {
    const WeightedDigraph g = testutil::random_graph(rng);
    std::size_t non_loops = 0;
    for (const Edge& e : g.edges) non_loops += e.src != e.dst;
    if (non_loops < 2) continue;
    const std::uint64_t seed = rng.next_u64();
    CHECK(rewire_null_model(g, seed, 5).edges == testutil::reference_rewire(g, seed, 5));
  }
}

TEST_CASE("parse -> serialize -> parse roundtrip is the identity") {
  Rng rng(31337);
  const std::vector<std::string> labels = {"plain", "with,comma", "with\"quote",
                                           "semi;colon", "øst priv"};
  for (int iter = 0; iter < 30; ++iter) {
    WeightedDigraph raw = testutil::random_graph(rng);
    for (std::size_t i = 0; i < raw.node_count() && i < labels.size(); ++i) {
      raw.nodes[i].id = labels[i] + std::to_string(iter);
    }
    if (raw.edges.empty()) continue;

    // first parse canonicalizes node order to first appearance
    WeightedDigraph g = parse_edge_list(to_edge_csv(raw));
    if (rng.uniform01() < 0.5) {
      g.nodes[0].lon = rng.uniform(-180, 180);
      g.nodes[0].lat = rng.uniform(-90, 90);
    }
    WeightedDigraph back = parse_edge_list(to_edge_csv(g));
    back = parse_node_metadata(to_node_csv(g), back).graph;
    CHECK(back == g);

    // weights survive serialization bit-exactly
    std::vector<double> w1, w2;
    for (const Edge& e : raw.edges) w1.push_back(e.weight);
    for (const Edge& e : g.edges) w2.push_back(e.weight);
    std::sort(w1.begin(), w1.end());
    std::sort(w2.begin(), w2.end());
    CHECK(w1 == w2);
  }
}

TEST_CASE("generate_er_digraph: size, degree and determinism") {
  const WeightedDigraph g = generate_er_digraph(200, 8.0, 5);
  CHECK(g.node_count() == 200);
  const double mean_deg = static_cast<double>(g.edge_count()) / 200.0;
  CHECK(mean_deg > 6.5);
  CHECK(mean_deg < 9.5);
  for (const Edge& e : g.edges) {
    CHECK(e.src != e.dst);
    CHECK(e.weight > 0.0);
    CHECK(e.weight <= 1.0);
  }
  CHECK(generate_er_digraph(200, 8.0, 5) == g);
  CHECK(!(generate_er_digraph(200, 8.0, 6) == g));
}

TEST_CASE("load_graph: synthetic locator and missing files") {
  const WeightedDigraph g = load_graph("synthetic:er,n=30,k=4,seed=2");
  CHECK(g.node_count() == 30);
  CHECK(g == generate_er_digraph(30, 4.0, 2));
  CHECK_THROWS_WITH_AS(load_graph("/no/such/file.csv"),
                       doctest::Contains("/no/such/file.csv"), std::runtime_error);
  CHECK_THROWS_AS(load_graph("synthetic:er,n=30"), std::runtime_error);
  CHECK_THROWS_AS(load_graph("synthetic:tree,n=30,k=4,seed=2"), std::runtime_error);
}
