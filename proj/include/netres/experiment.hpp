#pragma once

// Orchestration of the benchmarking pipeline: alpha sweeps, perturbation
// runs with repeated retraining, optional degree-preserving null models, and
// result emission (CSV tables, SVG curves, resolved config).
//
// Every random choice is seeded from master_seed via derive_seed() with a
// purpose tag, so a config reproduces its outputs byte-for-byte regardless
// of worker count.

#include <cstdint>
#include <string>
#include <vector>

#include "netres/graph.hpp"
#include "netres/metrics.hpp"
#include "netres/reservoir.hpp"
#include "netres/tasks.hpp"

namespace netres {

struct ExperimentConfig {
  std::string graph_path;  // file path or synthetic:er,... locator
  std::string nodes_path;  // optional id,lon,lat CSV
  TaskParams task = GoNogoParams{};
  SelectionStrategy strategy = SelectionStrategy::DegreeInformed;
  std::vector<double> alpha_grid = default_alpha_grid();
  // Output-node states live well inside (-1,1); ridge penalties of order 1
  // push the readout into always predicting the majority class.
  double lambda = 1e-3;
  std::size_t washout_steps = 0;
  std::size_t deletions_per_step = 3;
  std::size_t max_steps = 60;
  std::size_t repetitions = 10;
  std::size_t validation_seeds = 3;
  std::uint64_t master_seed = 1;
  bool rescale_after_perturbation = false;
  bool null_model = false;
  std::size_t swap_factor = 10;

  static std::vector<double> default_alpha_grid();  // 0.2, 0.4, ..., 2.0
};

struct StepRecord {
  std::vector<std::size_t> deleted_nodes;   // indices deleted at this step
  std::vector<std::string> deleted_labels;  // matching node ids
  MetricReport report;
};

struct PerturbationTrace {
  std::size_t repetition = 0;
  double alpha = 0.0;
  NodeSelection selection;
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;
  std::uint64_t selection_seed = 0;
  std::uint64_t dataset_seed = 0;
  std::uint64_t perturbation_seed = 0;
  std::vector<StepRecord> steps;  // steps[0] is the unperturbed run
};

struct AlphaSweepRow {
  double alpha = 0.0;
  double mean_balanced_accuracy = 0.0;
};

struct AlphaSweepResult {
  std::vector<AlphaSweepRow> rows;  // one per grid entry, grid order
  double best_alpha = 0.0;          // argmax, ties to the smaller alpha
};

struct AggregateRow {
  std::size_t step = 0;
  std::size_t n = 0;  // repetitions contributing
  double mean_balanced_accuracy = 0.0;
  double std_balanced_accuracy = 0.0;
  double mean_f1_macro = 0.0;
  double std_f1_macro = 0.0;
  double mean_filtered_accuracy = 0.0;
  double std_filtered_accuracy = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  AlphaSweepResult sweep;
  std::vector<PerturbationTrace> traces;
  std::vector<PerturbationTrace> null_traces;  // empty unless config.null_model
  std::uint64_t null_rewire_seed = 0;
};

// One full train/evaluate cycle: generate the dataset (task seed replaced by
// `seed`), split 80/20 by trial, build the reservoir, simulate train and
// test sequences from zero state, ridge-train the readout and score the test
// split.
MetricReport run_single(const WeightedDigraph& g, const NodeSelection& sel, double alpha,
                        const TaskParams& task, double lambda, std::uint64_t seed,
                        std::size_t washout_steps = 0);

// Mean balanced accuracy of run_single over validation seeds derived from
// (master_seed, "sweep-data", k), for each alpha in the grid. The same
// validation datasets are reused across alphas.
AlphaSweepResult alpha_sweep(const WeightedDigraph& g, const NodeSelection& sel,
                             const TaskParams& task, const std::vector<double>& alpha_grid,
                             double lambda, std::uint64_t master_seed,
                             std::size_t n_val_seeds, std::size_t jobs = 1,
                             std::size_t washout_steps = 0);

// One repetition of the perturbation protocol at a fixed alpha: evaluate the
// intact reservoir, then repeatedly silence deletions_per_step random
// non-I/O nodes (without replacement across the run) and re-evaluate, until
// max_steps or the eligible pool runs dry.
PerturbationTrace perturbation_run(const WeightedDigraph& g, const ExperimentConfig& cfg,
                                   double alpha, std::size_t rep_index);

// Sweep + repetitions (+ the same protocol on a rewired null model when
// configured). `jobs` caps worker threads; results are identical for any
// value.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1);

// Per-step mean and sample standard deviation over repetitions.
std::vector<AggregateRow> aggregate(const std::vector<PerturbationTrace>& traces);

// Emits trace_rep{k}.csv (and trace_null_rep{k}.csv), aggregate.csv,
// alpha_sweep.csv, config.json and perf_{metric}.svg into out_dir.
void write_results(const ExperimentResult& result, const std::string& out_dir);

// Resolved-config JSON (the schema accepted by config_from_json).
std::string config_to_json(const ExperimentConfig& cfg);

// Parses and validates a config JSON document. Unknown keys are rejected;
// a top-level "derived" object (emitted by write_results for provenance) is
// ignored.
ExperimentConfig config_from_json(const std::string& text);

}  // namespace netres
