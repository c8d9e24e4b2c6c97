// netres command line: run experiments, sweep alpha, generate task data,
// rewire null models and inspect graphs. See README for the config schema.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "netres/csv.hpp"
#include "netres/experiment.hpp"
#include "netres/graph.hpp"
#include "netres/reservoir.hpp"
#include "netres/rng.hpp"
#include "netres/tasks.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Applies a dotted-key=value override onto the config JSON. The value is
// parsed as JSON when possible, else taken as a string. The key path must
// already make sense for the schema: config_from_json rejects unknown keys.
void apply_override(nlohmann::json& config, const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos) {
    throw std::runtime_error("override must look like key.path=value, got '" + spec + "'");
  }
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);

  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;  // bare strings need no quotes
  }

  nlohmann::json* cursor = &config;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw std::runtime_error("empty override key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    cursor = &(*cursor)[parts[i]];
  }
  (*cursor)[parts.back()] = value;
}

netres::ExperimentConfig load_config(const std::string& config_path,
                                     const std::vector<std::string>& overrides) {
  nlohmann::json j = nlohmann::json::parse(read_file(config_path));
  for (const std::string& o : overrides) apply_override(j, o);
  return netres::config_from_json(j.dump());
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir, std::size_t jobs) {
  const netres::ExperimentConfig cfg = load_config(config_path, overrides);
  const netres::ExperimentResult result = netres::run_experiment(cfg, jobs);
  netres::write_results(result, out_dir);
  std::cout << "best alpha: " << netres::csv::format_double(result.sweep.best_alpha) << "\n";
  std::cout << "wrote results for " << result.traces.size() << " repetition(s) to " << out_dir
            << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::string& out_csv, std::size_t jobs) {
  const netres::ExperimentConfig cfg = load_config(config_path, overrides);
  const netres::WeightedDigraph g = netres::load_graph(cfg.graph_path);
  const netres::NodeSelection sel =
      netres::select_nodes(g, cfg.strategy, netres::derive_seed(cfg.master_seed, "sweep-select", 0));
  const netres::AlphaSweepResult sweep =
      netres::alpha_sweep(g, sel, cfg.task, cfg.alpha_grid, cfg.lambda, cfg.master_seed,
                          cfg.validation_seeds, jobs, cfg.washout_steps);

  std::string csv = "alpha,mean_balanced_accuracy\n";
  for (const netres::AlphaSweepRow& row : sweep.rows) {
    csv += netres::csv::format_double(row.alpha) + "," +
           netres::csv::format_double(row.mean_balanced_accuracy) + "\n";
  }
  std::cout << csv;
  std::cout << "best_alpha," << netres::csv::format_double(sweep.best_alpha) << "\n";
  write_file(out_csv, csv);
  return 0;
}

int cmd_gen_tasks(const std::string& task_name, std::uint64_t seed, const std::string& out,
                  std::size_t n_trials, double noise_sigma, bool have_trials,
                  bool have_noise) {
  netres::TaskParams params;
  if (netres::task_name_from_string(task_name) == netres::TaskName::PerceptualDecision) {
    netres::PdmParams p;
    p.seed = seed;
    if (have_trials) p.n_trials = n_trials;
    if (have_noise) p.noise_sigma = noise_sigma;
    params = p;
  } else {
    netres::GoNogoParams p;
    p.seed = seed;
    if (have_trials) p.n_trials = n_trials;
    if (have_noise) p.noise_sigma = noise_sigma;
    params = p;
  }
  write_file(out, netres::to_csv(netres::generate(params)));
  std::cout << "wrote " << task_name << " dataset to " << out << "\n";
  return 0;
}

int cmd_null_model(const std::string& graph, std::uint64_t seed, std::size_t swap_factor,
                   const std::string& out) {
  const netres::WeightedDigraph g = netres::load_graph(graph);
  const netres::WeightedDigraph rewired = netres::rewire_null_model(g, seed, swap_factor);
  write_file(out, netres::to_edge_csv(rewired));
  std::cout << "wrote rewired graph (" << rewired.edge_count() << " edges) to " << out << "\n";
  return 0;
}

int cmd_inspect(const std::string& graph) {
  const netres::WeightedDigraph g = netres::load_graph(graph);
  std::cout << "nodes: " << g.node_count() << "\n";
  std::cout << "edges: " << g.edge_count() << "\n";

  const netres::DegreeTable table = netres::degrees(g);
  auto print_top = [&](const std::string& title, auto degree_of, auto strength_of) {
    std::vector<std::size_t> order(g.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (degree_of(a) != degree_of(b)) return degree_of(a) > degree_of(b);
      if (strength_of(a) != strength_of(b)) return strength_of(a) > strength_of(b);
      return a < b;
    });
    std::cout << title << "\n";
    for (std::size_t k = 0; k < std::min<std::size_t>(5, order.size()); ++k) {
      const std::size_t i = order[k];
      std::cout << "  " << g.nodes[i].id << " degree=" << degree_of(i)
                << " strength=" << netres::csv::format_double(strength_of(i)) << "\n";
    }
  };
  print_top(
      "top out-degree:", [&](std::size_t i) { return table.per_node[i].out_degree; },
      [&](std::size_t i) { return table.per_node[i].out_strength; });
  print_top(
      "top in-degree:", [&](std::size_t i) { return table.per_node[i].in_degree; },
      [&](std::size_t i) { return table.per_node[i].in_strength; });

  if (g.node_count() > 0) {
    const netres::SpectralEstimate rho =
        netres::estimate_spectral_radius(netres::graph_to_matrix(g));
    std::cout << "rho_raw: " << netres::csv::format_double(rho.value)
              << (rho.converged ? "" : " (nonconverged upper bound)") << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netres: benchmark the state of a weighted directed network by running it "
               "as an echo state network reservoir"};
  app.require_subcommand(1);

  std::string config_path, out_path, graph_path, task_name;
  std::string sweep_out = "alpha_sweep.csv";
  std::vector<std::string> overrides;
  std::size_t jobs = 1;
  std::uint64_t seed = 1;
  std::size_t swap_factor = 10;
  std::size_t n_trials = 0;
  double noise_sigma = 0.0;

  CLI::App* run = app.add_subcommand("run", "run the full perturbation experiment");
  run->add_option("--config", config_path, "experiment config JSON")->required();
  run->add_option("--out", out_path, "output directory")->required();
  run->add_option("--jobs", jobs, "worker thread cap")->check(CLI::PositiveNumber);
  run->add_option("--set", overrides, "dotted-key=value config override (repeatable)");

  CLI::App* sweep = app.add_subcommand("sweep-alpha", "evaluate the alpha grid only");
  sweep->add_option("--config", config_path, "experiment config JSON")->required();
  sweep->add_option("--out", sweep_out, "output CSV path")->capture_default_str();
  sweep->add_option("--jobs", jobs, "worker thread cap")->check(CLI::PositiveNumber);
  sweep->add_option("--set", overrides, "dotted-key=value config override (repeatable)");

  CLI::App* gen = app.add_subcommand("gen-tasks", "generate a task dataset CSV");
  gen->add_option("--task", task_name, "pdm or gonogo")->required();
  gen->add_option("--seed", seed, "dataset seed");
  gen->add_option("--out", out_path, "output CSV path")->required();
  CLI::Option* trials_opt = gen->add_option("--n-trials", n_trials, "trial count");
  CLI::Option* noise_opt = gen->add_option("--noise-sigma", noise_sigma, "noise level");

  CLI::App* null_model = app.add_subcommand("null-model", "degree-preserving rewiring");
  null_model->add_option("--graph", graph_path, "edge list CSV or synthetic: locator")
      ->required();
  null_model->add_option("--seed", seed, "rewiring seed");
  null_model->add_option("--swap-factor", swap_factor, "attempted swaps per edge");
  null_model->add_option("--out", out_path, "output edge CSV path")->required();

  CLI::App* inspect = app.add_subcommand("inspect", "summarize a graph");
  inspect->add_option("--graph", graph_path, "edge list CSV or synthetic: locator")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, overrides, out_path, jobs);
    if (sweep->parsed()) return cmd_sweep(config_path, overrides, sweep_out, jobs);
    if (gen->parsed()) {
      return cmd_gen_tasks(task_name, seed, out_path, n_trials, noise_sigma,
                           trials_opt->count() > 0, noise_opt->count() > 0);
    }
    if (null_model->parsed()) return cmd_null_model(graph_path, seed, swap_factor, out_path);
    if (inspect->parsed()) return cmd_inspect(graph_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
