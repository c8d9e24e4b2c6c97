#include "netres/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "netres/csv.hpp"
#include "netres/rng.hpp"

namespace netres {

namespace {

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

double parse_weight(std::string_view s, std::size_t line) {
  double w = 0.0;
  try {
    w = csv::parse_double(s);
  } catch (const std::exception&) {
    fail_line(line, "malformed weight '" + std::string(s) + "'");
  }
  if (!std::isfinite(w)) fail_line(line, "weight must be finite");
  if (w < 0.0) fail_line(line, "weight must be nonnegative");
  return w;
}

// (src,dst) pair key for duplicate detection
std::uint64_t pair_key(std::size_t src, std::size_t dst) {
  return (static_cast<std::uint64_t>(src) << 32) | static_cast<std::uint64_t>(dst);
}

}  // namespace

WeightedDigraph parse_edge_list(std::string_view text) {
  csv::LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw std::runtime_error("empty edge list: missing header");
  if (csv::split_line(line) != std::vector<std::string>{"src", "dst", "weight"}) {
    fail_line(reader.line_number(), "expected header 'src,dst,weight'");
  }

  WeightedDigraph g;
  std::unordered_map<std::string, std::size_t> index_of;
  std::unordered_set<std::uint64_t> seen_pairs;

  auto intern = [&](std::string label) {
    auto [it, inserted] = index_of.try_emplace(std::move(label), g.nodes.size());
    if (inserted) g.nodes.push_back(Node{it->first, std::nullopt, std::nullopt});
    return it->second;
  };

  while (reader.next(line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = csv::split_line(line);
    } catch (const std::exception& e) {
      fail_line(reader.line_number(), e.what());
    }
    if (fields.size() != 3) fail_line(reader.line_number(), "expected 3 fields, got " +
                                                            std::to_string(fields.size()));
    const std::size_t src = intern(std::move(fields[0]));
    const std::size_t dst = intern(std::move(fields[1]));
    const double w = parse_weight(fields[2], reader.line_number());
    if (!seen_pairs.insert(pair_key(src, dst)).second) {
      fail_line(reader.line_number(), "duplicate edge " + g.nodes[src].id + " -> " +
                                      g.nodes[dst].id);
    }
    g.edges.push_back(Edge{src, dst, w});
  }
  return g;
}

MetadataResult parse_node_metadata(std::string_view text, const WeightedDigraph& g) {
  csv::LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw std::runtime_error("empty metadata: missing header");
  if (csv::split_line(line) != std::vector<std::string>{"id", "lon", "lat"}) {
    fail_line(reader.line_number(), "expected header 'id,lon,lat'");
  }

  std::unordered_map<std::string_view, std::size_t> index_of;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) index_of.emplace(g.nodes[i].id, i);

  MetadataResult result{g, 0};
  while (reader.next(line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = csv::split_line(line);
    } catch (const std::exception& e) {
      fail_line(reader.line_number(), e.what());
    }
    if (fields.size() != 3) fail_line(reader.line_number(), "expected 3 fields, got " +
                                                            std::to_string(fields.size()));
    double lon = 0.0, lat = 0.0;
    try {
      lon = csv::parse_double(fields[1]);
      lat = csv::parse_double(fields[2]);
    } catch (const std::exception&) {
      fail_line(reader.line_number(), "malformed coordinate");
    }
    if (!std::isfinite(lon) || !std::isfinite(lat)) {
      fail_line(reader.line_number(), "coordinate must be finite");
    }
    auto it = index_of.find(fields[0]);
    if (it == index_of.end()) {
      ++result.unmatched_rows;
      continue;
    }
    result.graph.nodes[it->second].lon = lon;
    result.graph.nodes[it->second].lat = lat;
  }
  return result;
}

std::string to_edge_csv(const WeightedDigraph& g) {
  std::string out = "src,dst,weight\n";
  for (const Edge& e : g.edges) {
    out += csv::quote(g.nodes[e.src].id);
    out += ',';
    out += csv::quote(g.nodes[e.dst].id);
    out += ',';
    out += csv::format_double(e.weight);
    out += '\n';
  }
  return out;
}

std::string to_node_csv(const WeightedDigraph& g) {
  std::string out = "id,lon,lat\n";
  for (const Node& n : g.nodes) {
    if (!n.lon || !n.lat) continue;
    out += csv::quote(n.id);
    out += ',';
    out += csv::format_double(*n.lon);
    out += ',';
    out += csv::format_double(*n.lat);
    out += '\n';
  }
  return out;
}

DegreeTable degrees(const WeightedDigraph& g) {
  DegreeTable table;
  table.per_node.resize(g.nodes.size());
  for (const Edge& e : g.edges) {
    table.per_node[e.src].out_degree += 1;
    table.per_node[e.src].out_strength += e.weight;
    table.per_node[e.dst].in_degree += 1;
    table.per_node[e.dst].in_strength += e.weight;
  }
  return table;
}

WeightedDigraph delete_nodes(const WeightedDigraph& g, const std::vector<std::size_t>& ids) {
  std::vector<bool> doomed(g.nodes.size(), false);
  for (std::size_t id : ids) {
    if (id >= g.nodes.size()) {
      throw std::runtime_error("delete_nodes: unknown node index " + std::to_string(id));
    }
    doomed[id] = true;
  }

  WeightedDigraph out;
  std::vector<std::size_t> remap(g.nodes.size(), SIZE_MAX);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (doomed[i]) continue;
    remap[i] = out.nodes.size();
    out.nodes.push_back(g.nodes[i]);
  }
  for (const Edge& e : g.edges) {
    if (doomed[e.src] || doomed[e.dst]) continue;
    out.edges.push_back(Edge{remap[e.src], remap[e.dst], e.weight});
  }
  return out;
}

WeightedDigraph rewire_null_model(const WeightedDigraph& g, std::uint64_t seed,
                                  std::size_t swap_factor) {
  std::vector<std::size_t> swappable;  // indices of non-self-loop edges
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (g.edges[i].src != g.edges[i].dst) swappable.push_back(i);
  }
  if (swappable.size() < 2) {
    throw std::runtime_error("rewire_null_model: need at least 2 non-self-loop edges");
  }

  WeightedDigraph out = g;
  std::unordered_set<std::uint64_t> present;
  present.reserve(out.edges.size() * 2);
  for (const Edge& e : out.edges) present.insert(pair_key(e.src, e.dst));

  Rng rng(seed);
  const std::size_t attempts = swap_factor * out.edges.size();
  for (std::size_t a = 0; a < attempts; ++a) {
    Edge& e1 = out.edges[swappable[rng.below(swappable.size())]];
    Edge& e2 = out.edges[swappable[rng.below(swappable.size())]];
    // Candidate replacement: e1 becomes a->d, e2 becomes c->b.
    if (e1.src == e2.src || e1.dst == e2.dst) continue;
    if (e1.src == e2.dst || e2.src == e1.dst) continue;  // would create a self-loop
    if (present.contains(pair_key(e1.src, e2.dst))) continue;
    if (present.contains(pair_key(e2.src, e1.dst))) continue;
    present.erase(pair_key(e1.src, e1.dst));
    present.erase(pair_key(e2.src, e2.dst));
    std::swap(e1.dst, e2.dst);
    present.insert(pair_key(e1.src, e1.dst));
    present.insert(pair_key(e2.src, e2.dst));
  }
  return out;
}

WeightedDigraph generate_er_digraph(std::size_t n, double mean_out_degree, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate_er_digraph: need at least 2 nodes");
  if (mean_out_degree <= 0.0 || mean_out_degree > static_cast<double>(n - 1)) {
    throw std::invalid_argument("generate_er_digraph: mean out-degree must be in (0, n-1]");
  }
  const double p = mean_out_degree / static_cast<double>(n - 1);

  WeightedDigraph g;
  g.nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.nodes.push_back(Node{"n" + std::to_string(i), std::nullopt, std::nullopt});
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rng.uniform01() < p) {
        g.edges.push_back(Edge{i, j, 1.0 - rng.uniform01()});
      }
    }
  }
  return g;
}

WeightedDigraph load_graph(const std::string& path_or_locator) {
  constexpr std::string_view kScheme = "synthetic:";
  if (path_or_locator.rfind(kScheme, 0) == 0) {
    std::string_view rest(path_or_locator);
    rest.remove_prefix(kScheme.size());
    // form: er,n=<nodes>,k=<mean out-degree>,seed=<seed>
    std::size_t n = 0;
    double k = 0.0;
    std::uint64_t seed = 0;
    bool have_n = false, have_k = false, have_seed = false, is_er = false;
    std::stringstream ss{std::string(rest)};
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part == "er") {
        is_er = true;
      } else if (part.rfind("n=", 0) == 0) {
        n = std::stoull(part.substr(2));
        have_n = true;
      } else if (part.rfind("k=", 0) == 0) {
        k = std::stod(part.substr(2));
        have_k = true;
      } else if (part.rfind("seed=", 0) == 0) {
        seed = std::stoull(part.substr(5));
        have_seed = true;
      } else {
        throw std::runtime_error("bad synthetic graph locator part: '" + part + "'");
      }
    }
    if (!is_er || !have_n || !have_k || !have_seed) {
      throw std::runtime_error(
          "synthetic locator must look like synthetic:er,n=356,k=10,seed=1");
    }
    return generate_er_digraph(n, k, seed);
  }

  std::ifstream in(path_or_locator, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open graph file: " + path_or_locator);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_edge_list(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path_or_locator + ": " + e.what());
  }
}

}  // namespace netres
