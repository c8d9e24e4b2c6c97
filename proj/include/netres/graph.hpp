#pragma once

// Weighted directed graphs: edge-list CSV parsing, node metadata, degree
// tables, node deletion and degree-preserving rewiring. Graphs are plain
// values; every operation returns a fresh graph and leaves its input alone.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netres {

struct Node {
  std::string id;
  std::optional<double> lon;
  std::optional<double> lat;

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

// Node order is first appearance in the source CSV and is preserved by every
// operation; all downstream indexing relies on it. Parallel (src,dst)
// duplicates are forbidden, opposing directions and self-loops are fine.
struct WeightedDigraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  bool operator==(const WeightedDigraph&) const = default;
};

struct NodeDegrees {
  std::size_t in_degree = 0;
  std::size_t out_degree = 0;
  double in_strength = 0.0;
  double out_strength = 0.0;

  bool operator==(const NodeDegrees&) const = default;
};

struct DegreeTable {
  std::vector<NodeDegrees> per_node;

  bool operator==(const DegreeTable&) const = default;
};

// Parses `src,dst,weight` CSV. Throws std::runtime_error with the offending
// line number on malformed rows, negative/non-finite weights and duplicate
// (src,dst) pairs.
WeightedDigraph parse_edge_list(std::string_view text);

struct MetadataResult {
  WeightedDigraph graph;
  std::size_t unmatched_rows = 0;  // rows naming nodes absent from the graph
};

// Parses `id,lon,lat` CSV and attaches coordinates to matching nodes.
MetadataResult parse_node_metadata(std::string_view text, const WeightedDigraph& g);

std::string to_edge_csv(const WeightedDigraph& g);
std::string to_node_csv(const WeightedDigraph& g);

DegreeTable degrees(const WeightedDigraph& g);

// Removes the named nodes and all incident edges; surviving node order is
// preserved and edge indices re-based. Duplicate ids are tolerated.
WeightedDigraph delete_nodes(const WeightedDigraph& g, const std::vector<std::size_t>& ids);

// Degree-preserving randomization: swap_factor * |edges| attempted directed
// double-edge swaps (a->b, c->d) => (a->d, c->b), each edge keeping its
// weight. A swap is rejected when it would duplicate an existing edge,
// create a new self-loop, or when the picked edges share an endpoint on the
// same side. Self-loops are never picked and survive unchanged. Requires at
// least two non-self-loop edges.
WeightedDigraph rewire_null_model(const WeightedDigraph& g, std::uint64_t seed,
                                  std::size_t swap_factor);

// Directed Erdos-Renyi-style generator: each ordered pair (i,j), i != j, is
// an edge with probability mean_out_degree/(n-1); weights uniform in (0,1].
WeightedDigraph generate_er_digraph(std::size_t n, double mean_out_degree, std::uint64_t seed);

// Reads a graph from a file path, or generates one from a
// "synthetic:er,n=<nodes>,k=<mean out-degree>,seed=<seed>" locator.
WeightedDigraph load_graph(const std::string& path_or_locator);

}  // namespace netres
