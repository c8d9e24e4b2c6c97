#pragma once

// Echo state reservoirs built from weighted digraphs: I/O node selection,
// alpha scaling to a target spectral radius, tanh state simulation and node
// silencing for perturbation experiments.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "netres/graph.hpp"
#include "netres/matrix.hpp"

namespace netres {

enum class SelectionStrategy { Random, DegreeInformed };

std::string strategy_string(SelectionStrategy s);
SelectionStrategy strategy_from_string(const std::string& s);

// Three input nodes (one per task channel) and six readout nodes, pairwise
// distinct when produced by select_nodes.
struct NodeSelection {
  std::array<std::size_t, 3> input_nodes{};
  std::array<std::size_t, 6> output_nodes{};
  SelectionStrategy strategy = SelectionStrategy::Random;

  bool contains(std::size_t node) const;
  bool operator==(const NodeSelection&) const = default;
};

struct EsnConfig {
  double alpha = 1.0;  // target spectral radius of the scaled weights
  std::uint64_t seed = 0;  // seeds the spectral-radius power iteration restarts
};

struct SpectralEstimate {
  double value = 0.0;
  bool converged = false;
};

// Largest eigenvalue magnitude via power iteration: 10 random restarts,
// tolerance 1e-10 on the norm-ratio estimate, at most 10000 iterations per
// restart, result is the max over converged restarts. If no restart
// converges (e.g. several eigenvalues share the top magnitude), falls back
// to the largest singular value, an upper bound, with converged = false.
SpectralEstimate estimate_spectral_radius(const Matrix& w, std::uint64_t seed = 0x5eed);

// w(i,j) = weight of edge j -> i.
Matrix graph_to_matrix(const WeightedDigraph& g);

// Random: 9 distinct nodes uniformly, first 3 input, next 6 output.
// DegreeInformed: top 3 by out-degree as inputs, then top 6 by in-degree
// among the rest as outputs; ties broken by higher strength, then lower
// index. Requires at least 9 nodes.
NodeSelection select_nodes(const WeightedDigraph& g, SelectionStrategy strategy,
                           std::uint64_t seed);

struct Esn {
  Matrix w;  // scaled reservoir weights, w(i,j) = weight of edge j -> i
  NodeSelection selection;
  double alpha_applied = 0.0;
  double rho_raw = 0.0;  // spectral-radius estimate of the unscaled matrix
  bool rho_converged = true;

  // Wraps an already-scaled matrix; indices are validated against the matrix
  // but no scaling or distinctness checks are applied.
  static Esn from_scaled(Matrix w, NodeSelection selection);
};

// Scales the graph's weight matrix so its spectral radius equals cfg.alpha.
// Nilpotent topologies (zero spectral radius) scale by max |w| instead; an
// all-zero matrix is rejected as a degenerate reservoir.
Esn build_esn(const WeightedDigraph& g, const NodeSelection& sel, const EsnConfig& cfg);

struct StateTrace {
  Matrix states;         // T x N, row t = state after consuming input row t
  Matrix output_states;  // T x 6, columns in output_nodes order
};

// x(t) = tanh(W x(t-1) + B u(t)) from x(0) = 0, where B injects channel k
// into input_nodes[k] with coefficient exactly 1. inputs must have 3 columns.
StateTrace simulate(const Esn& esn, const Matrix& inputs);

// Same update from an explicit initial state (length N).
StateTrace simulate_from(const Esn& esn, const Matrix& inputs,
                         const std::vector<double>& initial_state);

// Silences nodes by zeroing their rows and columns. No re-scaling is applied;
// ids must stay clear of the input and output nodes.
Esn zero_out_nodes(const Esn& esn, const std::vector<std::size_t>& ids);

// Provenance descriptor (labels, selection, alpha, rho) and a full CSV dump
// of the scaled matrix.
std::string esn_to_json(const Esn& esn, const WeightedDigraph& g);
std::string esn_matrix_csv(const Esn& esn);

}  // namespace netres
