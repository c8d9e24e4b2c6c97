#include "netres/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "netres/csv.hpp"
#include "netres/rng.hpp"

#include "json.hpp"

namespace netres {

namespace {

constexpr double kSpectralTol = 1e-10;
constexpr std::size_t kMaxIterations = 10000;
constexpr std::size_t kRestarts = 10;
constexpr double kRhoEpsilon = 1e-12;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// One power-iteration run; the estimate is ||W x_k|| for unit x_k. Returns
// converged = false when the estimate has not stabilised within the budget,
// which happens when several eigenvalues tie in magnitude.
SpectralEstimate power_iterate(const SparseView& w, std::vector<double> x) {
  const double nx = norm2(x);
  if (nx == 0.0) return {0.0, false};
  for (double& v : x) v /= nx;

  std::vector<double> y(x.size());
  double prev = -1.0;
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    w.multiply(x.data(), y.data());
    const double ny = norm2(y);
    if (ny < 1e-300) return {0.0, true};  // hit the kernel: nilpotent direction
    if (prev >= 0.0 && std::abs(ny - prev) <= kSpectralTol * std::max(ny, 1e-300)) {
      return {ny, true};
    }
    prev = ny;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / ny;
  }
  return {prev, false};
}

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal(0.0, 1.0);
  return v;
}

// Largest singular value via power iteration on W^T W (symmetric, so the
// norm-ratio estimate converges monotonically in practice).
double largest_singular_value(const SparseView& w, Rng& rng) {
  std::vector<double> x = random_vector(rng, w.n);
  const double nx = norm2(x);
  if (nx == 0.0) return 0.0;
  for (double& v : x) v /= nx;

  std::vector<double> ax(w.n), atax(w.n);
  double prev = -1.0;
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    w.multiply(x.data(), ax.data());
    w.multiply_transposed(ax.data(), atax.data());
    const double ny = norm2(atax);
    if (ny < 1e-300) return 0.0;
    if (prev >= 0.0 && std::abs(ny - prev) <= kSpectralTol * std::max(ny, 1e-300)) {
      return std::sqrt(ny);
    }
    prev = ny;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = atax[i] / ny;
  }
  return std::sqrt(std::max(prev, 0.0));
}

struct DegreeRank {
  std::size_t index;
  std::size_t degree;
  double strength;
};

// Higher degree first, then higher strength, then lower index.
bool rank_before(const DegreeRank& a, const DegreeRank& b) {
  if (a.degree != b.degree) return a.degree > b.degree;
  if (a.strength != b.strength) return a.strength > b.strength;
  return a.index < b.index;
}

}  // namespace

std::string strategy_string(SelectionStrategy s) {
  return s == SelectionStrategy::Random ? "random" : "informed";
}

SelectionStrategy strategy_from_string(const std::string& s) {
  if (s == "random") return SelectionStrategy::Random;
  if (s == "informed") return SelectionStrategy::DegreeInformed;
  throw std::invalid_argument("unknown strategy '" + s + "' (expected random or informed)");
}

bool NodeSelection::contains(std::size_t node) const {
  return std::find(input_nodes.begin(), input_nodes.end(), node) != input_nodes.end() ||
         std::find(output_nodes.begin(), output_nodes.end(), node) != output_nodes.end();
}

SpectralEstimate estimate_spectral_radius(const Matrix& w, std::uint64_t seed) {
  if (!w.square()) throw std::invalid_argument("estimate_spectral_radius: matrix must be square");
  if (w.rows == 0) return {0.0, true};

  const SparseView sparse(w);
  Rng rng(seed);
  double best = -1.0;
  for (std::size_t r = 0; r < kRestarts; ++r) {
    const SpectralEstimate est = power_iterate(sparse, random_vector(rng, w.rows));
    if (est.converged) best = std::max(best, est.value);
  }
  if (best >= 0.0) return {best, true};
  return {largest_singular_value(sparse, rng), false};
}

Matrix graph_to_matrix(const WeightedDigraph& g) {
  Matrix w(g.node_count(), g.node_count());
  for (const Edge& e : g.edges) w(e.dst, e.src) = e.weight;
  return w;
}

NodeSelection select_nodes(const WeightedDigraph& g, SelectionStrategy strategy,
                           std::uint64_t seed) {
  constexpr std::size_t kNeeded = 9;
  if (g.node_count() < kNeeded) {
    throw std::runtime_error("select_nodes: graph has " + std::to_string(g.node_count()) +
                             " nodes, need at least 9");
  }

  NodeSelection sel;
  sel.strategy = strategy;

  if (strategy == SelectionStrategy::Random) {
    Rng rng(seed);
    const std::vector<std::size_t> picks = rng.sample_indices(g.node_count(), kNeeded);
    std::copy_n(picks.begin(), 3, sel.input_nodes.begin());
    std::copy_n(picks.begin() + 3, 6, sel.output_nodes.begin());
    return sel;
  }

  const DegreeTable table = degrees(g);
  std::vector<DegreeRank> by_out(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    by_out[i] = {i, table.per_node[i].out_degree, table.per_node[i].out_strength};
  }
  std::sort(by_out.begin(), by_out.end(), rank_before);
  for (std::size_t k = 0; k < 3; ++k) sel.input_nodes[k] = by_out[k].index;

  std::vector<DegreeRank> by_in;
  by_in.reserve(g.node_count() - 3);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (std::find(sel.input_nodes.begin(), sel.input_nodes.end(), i) != sel.input_nodes.end()) {
      continue;
    }
    by_in.push_back({i, table.per_node[i].in_degree, table.per_node[i].in_strength});
  }
  std::sort(by_in.begin(), by_in.end(), rank_before);
  for (std::size_t k = 0; k < 6; ++k) sel.output_nodes[k] = by_in[k].index;
  return sel;
}

Esn Esn::from_scaled(Matrix w, NodeSelection selection) {
  if (!w.square()) throw std::invalid_argument("Esn::from_scaled: matrix must be square");
  for (std::size_t i : selection.input_nodes) {
    if (i >= w.rows) throw std::invalid_argument("Esn::from_scaled: input node out of range");
  }
  for (std::size_t i : selection.output_nodes) {
    if (i >= w.rows) throw std::invalid_argument("Esn::from_scaled: output node out of range");
  }
  Esn esn;
  esn.rho_raw = 0.0;
  esn.alpha_applied = 0.0;
  esn.w = std::move(w);
  esn.selection = selection;
  return esn;
}

Esn build_esn(const WeightedDigraph& g, const NodeSelection& sel, const EsnConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("build_esn: alpha must be positive");
  for (std::size_t i : sel.input_nodes) {
    if (i >= g.node_count()) throw std::invalid_argument("build_esn: input node out of range");
  }
  for (std::size_t i : sel.output_nodes) {
    if (i >= g.node_count()) throw std::invalid_argument("build_esn: output node out of range");
  }

  Matrix w = graph_to_matrix(g);
  const SpectralEstimate rho = estimate_spectral_radius(w, cfg.seed);

  double scale = 0.0;
  if (rho.value > kRhoEpsilon) {
    scale = cfg.alpha / rho.value;
  } else {
    double max_abs = 0.0;
    for (double v : w.data) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) throw std::runtime_error("build_esn: degenerate reservoir (all weights zero)");
    scale = cfg.alpha / max_abs;
  }
  for (double& v : w.data) v *= scale;

  Esn esn;
  esn.w = std::move(w);
  esn.selection = sel;
  esn.alpha_applied = cfg.alpha;
  esn.rho_raw = rho.value;
  esn.rho_converged = rho.converged;
  return esn;
}

StateTrace simulate_from(const Esn& esn, const Matrix& inputs,
                         const std::vector<double>& initial_state) {
  if (inputs.cols != 3) {
    throw std::invalid_argument("simulate: inputs must have 3 columns, got " +
                                std::to_string(inputs.cols));
  }
  const std::size_t n = esn.w.rows;
  if (initial_state.size() != n) {
    throw std::invalid_argument("simulate: initial state length mismatch");
  }

  const SparseView w(esn.w);
  StateTrace trace;
  trace.states = Matrix(inputs.rows, n);
  trace.output_states = Matrix(inputs.rows, esn.selection.output_nodes.size());

  std::vector<double> x = initial_state;
  std::vector<double> acc(n);
  for (std::size_t t = 0; t < inputs.rows; ++t) {
    w.multiply(x.data(), acc.data());
    for (std::size_t k = 0; k < esn.selection.input_nodes.size(); ++k) {
      acc[esn.selection.input_nodes[k]] += inputs(t, k);
    }
    double* row = trace.states.row(t);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::tanh(acc[i]);
      row[i] = x[i];
    }
    for (std::size_t k = 0; k < esn.selection.output_nodes.size(); ++k) {
      trace.output_states(t, k) = x[esn.selection.output_nodes[k]];
    }
  }
  return trace;
}

StateTrace simulate(const Esn& esn, const Matrix& inputs) {
  return simulate_from(esn, inputs, std::vector<double>(esn.w.rows, 0.0));
}

Esn zero_out_nodes(const Esn& esn, const std::vector<std::size_t>& ids) {
  Esn out = esn;
  for (std::size_t id : ids) {
    if (id >= esn.w.rows) {
      throw std::runtime_error("zero_out_nodes: unknown node index " + std::to_string(id));
    }
    if (esn.selection.contains(id)) {
      throw std::runtime_error("zero_out_nodes: node " + std::to_string(id) +
                               " is an input or output node and must not be deleted");
    }
  }
  for (std::size_t id : ids) {
    for (std::size_t j = 0; j < out.w.cols; ++j) out.w(id, j) = 0.0;
    for (std::size_t i = 0; i < out.w.rows; ++i) out.w(i, id) = 0.0;
  }
  return out;
}

std::string esn_to_json(const Esn& esn, const WeightedDigraph& g) {
  if (g.node_count() != esn.w.rows) {
    throw std::invalid_argument("esn_to_json: graph/matrix size mismatch");
  }
  nlohmann::ordered_json j;
  j["n_nodes"] = esn.w.rows;
  j["alpha"] = esn.alpha_applied;
  j["rho_raw"] = esn.rho_raw;
  j["rho_converged"] = esn.rho_converged;
  j["strategy"] = strategy_string(esn.selection.strategy);
  auto labels_of = [&](const auto& indices) {
    std::vector<std::string> labels;
    for (std::size_t i : indices) labels.push_back(g.nodes[i].id);
    return labels;
  };
  j["input_nodes"] = labels_of(esn.selection.input_nodes);
  j["output_nodes"] = labels_of(esn.selection.output_nodes);
  return j.dump(2) + "\n";
}

std::string esn_matrix_csv(const Esn& esn) {
  std::string out;
  for (std::size_t i = 0; i < esn.w.rows; ++i) {
    for (std::size_t j = 0; j < esn.w.cols; ++j) {
      if (j) out += ',';
      out += csv::format_double(esn.w(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace netres
