#include "netres/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "netres/csv.hpp"
#include "netres/plot.hpp"
#include "netres/readout.hpp"
#include "netres/rng.hpp"

#include "json.hpp"

namespace netres {

namespace {

constexpr double kTrainFraction = 0.8;

// Purpose tags for derive_seed; also listed in the README.
constexpr std::string_view kTagSweepSelect = "sweep-select";
constexpr std::string_view kTagSweepData = "sweep-data";
constexpr std::string_view kTagSelect = "select";
constexpr std::string_view kTagData = "data";
constexpr std::string_view kTagPerturb = "perturb";
constexpr std::string_view kTagRewire = "rewire";

TaskParams with_seed(TaskParams task, std::uint64_t seed) {
  std::visit([seed](auto& p) { p.seed = seed; }, task);
  return task;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_workers = std::min(jobs, count);
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

MetricReport evaluate_esn(const Esn& esn, const TaskDataset& train, const TaskDataset& test,
                          double lambda, std::size_t washout_steps) {
  if (washout_steps >= train.step_count()) {
    throw std::runtime_error("washout longer than the training split");
  }
  const StateTrace train_trace = simulate(esn, train.inputs);
  Matrix features(train.step_count() - washout_steps, train_trace.output_states.cols);
  for (std::size_t t = 0; t < features.rows; ++t) {
    for (std::size_t c = 0; c < features.cols; ++c) {
      features(t, c) = train_trace.output_states(t + washout_steps, c);
    }
  }
  const std::vector<int> train_labels(train.labels.begin() + washout_steps,
                                      train.labels.end());
  const ReadoutModel model = train_readout(features, train_labels, lambda);

  const StateTrace test_trace = simulate(esn, test.inputs);
  const std::vector<int> preds = predict(model, test_trace.output_states);
  std::vector<double> fixation(test.step_count());
  for (std::size_t t = 0; t < fixation.size(); ++t) fixation[t] = test.inputs(t, 0);
  return evaluate(test.labels, preds, fixation);
}

// Re-scales an already-scaled (possibly damaged) matrix back to the target
// spectral radius; leaves the matrix alone when it has gone entirely silent.
void rescale_to_alpha(Esn& esn, double alpha) {
  const SpectralEstimate rho = estimate_spectral_radius(esn.w);
  double denom = rho.value;
  if (denom <= 1e-12) {
    denom = 0.0;
    for (double v : esn.w.data) denom = std::max(denom, std::abs(v));
    if (denom == 0.0) return;
  }
  const double scale = alpha / denom;
  for (double& v : esn.w.data) v *= scale;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.alpha_grid.empty()) throw std::invalid_argument("config: alpha_grid must be nonempty");
  for (double a : cfg.alpha_grid) {
    if (!(a > 0.0)) throw std::invalid_argument("config: alpha values must be positive");
  }
  if (cfg.deletions_per_step < 1) {
    throw std::invalid_argument("config: deletions_per_step must be >= 1");
  }
  if (cfg.repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
  if (cfg.validation_seeds < 1) {
    throw std::invalid_argument("config: validation_seeds must be >= 1");
  }
  if (!(cfg.lambda >= 0.0)) throw std::invalid_argument("config: lambda must be >= 0");
}

std::string labels_field(const std::vector<std::string>& labels) {
  std::string joined;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) joined += ';';
    joined += labels[i];
  }
  return csv::quote(joined);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string trace_csv(const PerturbationTrace& trace) {
  std::string out = "step,deleted_ids,balanced_accuracy,f1_macro,filtered_accuracy\n";
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const StepRecord& rec = trace.steps[s];
    out += std::to_string(s);
    out += ',';
    out += labels_field(rec.deleted_labels);
    out += ',';
    out += csv::format_double(rec.report.balanced_accuracy);
    out += ',';
    out += csv::format_double(rec.report.f1_macro);
    out += ',';
    out += csv::format_double(rec.report.filtered_accuracy);
    out += '\n';
  }
  return out;
}

void append_aggregate_rows(std::string& out, const std::string& model,
                           const std::vector<AggregateRow>& rows) {
  for (const AggregateRow& r : rows) {
    out += model;
    out += ',';
    out += std::to_string(r.step);
    out += ',';
    out += csv::format_double(r.mean_balanced_accuracy);
    out += ',';
    out += csv::format_double(r.std_balanced_accuracy);
    out += ',';
    out += csv::format_double(r.mean_f1_macro);
    out += ',';
    out += csv::format_double(r.std_f1_macro);
    out += ',';
    out += csv::format_double(r.mean_filtered_accuracy);
    out += ',';
    out += csv::format_double(r.std_filtered_accuracy);
    out += ',';
    out += std::to_string(r.n);
    out += '\n';
  }
}

nlohmann::ordered_json task_to_json(const TaskParams& task) {
  nlohmann::ordered_json j;
  if (const auto* p = std::get_if<PdmParams>(&task)) {
    j["name"] = "pdm";
    j["n_trials"] = p->n_trials;
    j["fix_steps"] = p->fix_steps;
    j["stim_steps"] = p->stim_steps;
    j["decision_steps"] = p->decision_steps;
    j["noise_sigma"] = p->noise_sigma;
    j["coherences"] = p->coherences;
  } else {
    const auto& gp = std::get<GoNogoParams>(task);
    j["name"] = "gonogo";
    j["n_trials"] = gp.n_trials;
    j["fix_steps"] = gp.fix_steps;
    j["cue_steps"] = gp.cue_steps;
    j["delay_steps"] = gp.delay_steps;
    j["decision_steps"] = gp.decision_steps;
    j["noise_sigma"] = gp.noise_sigma;
  }
  return j;
}

void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::runtime_error("config: unknown key '" + where + key + "'");
    }
  }
}

TaskParams task_from_json(const nlohmann::json& j) {
  if (!j.contains("name")) throw std::runtime_error("config: task.name is required");
  const TaskName name = task_name_from_string(j.at("name").get<std::string>());
  if (name == TaskName::PerceptualDecision) {
    reject_unknown_keys(j,
                        {"name", "n_trials", "fix_steps", "stim_steps", "decision_steps",
                         "noise_sigma", "coherences"},
                        "task.");
    PdmParams p;
    p.n_trials = j.value("n_trials", p.n_trials);
    p.fix_steps = j.value("fix_steps", p.fix_steps);
    p.stim_steps = j.value("stim_steps", p.stim_steps);
    p.decision_steps = j.value("decision_steps", p.decision_steps);
    p.noise_sigma = j.value("noise_sigma", p.noise_sigma);
    p.coherences = j.value("coherences", p.coherences);
    return p;
  }
  reject_unknown_keys(j,
                      {"name", "n_trials", "fix_steps", "cue_steps", "delay_steps",
                       "decision_steps", "noise_sigma"},
                      "task.");
  GoNogoParams p;
  p.n_trials = j.value("n_trials", p.n_trials);
  p.fix_steps = j.value("fix_steps", p.fix_steps);
  p.cue_steps = j.value("cue_steps", p.cue_steps);
  p.delay_steps = j.value("delay_steps", p.delay_steps);
  p.decision_steps = j.value("decision_steps", p.decision_steps);
  p.noise_sigma = j.value("noise_sigma", p.noise_sigma);
  return p;
}

}  // namespace

std::vector<double> ExperimentConfig::default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(i * 0.2);
  return grid;
}

MetricReport run_single(const WeightedDigraph& g, const NodeSelection& sel, double alpha,
                        const TaskParams& task, double lambda, std::uint64_t seed,
                        std::size_t washout_steps) {
  const TaskDataset dataset = generate(with_seed(task, seed));
  const auto [train, test] = split_by_trial(dataset, kTrainFraction);
  const Esn esn = build_esn(g, sel, EsnConfig{alpha, 0});
  return evaluate_esn(esn, train, test, lambda, washout_steps);
}

AlphaSweepResult alpha_sweep(const WeightedDigraph& g, const NodeSelection& sel,
                             const TaskParams& task, const std::vector<double>& alpha_grid,
                             double lambda, std::uint64_t master_seed,
                             std::size_t n_val_seeds, std::size_t jobs,
                             std::size_t washout_steps) {
  if (alpha_grid.empty()) throw std::invalid_argument("alpha_sweep: empty grid");
  if (n_val_seeds < 1) throw std::invalid_argument("alpha_sweep: need at least 1 seed");

  std::vector<double> scores(alpha_grid.size() * n_val_seeds);
  parallel_for(scores.size(), jobs, [&](std::size_t job) {
    const std::size_t ai = job / n_val_seeds;
    const std::size_t k = job % n_val_seeds;
    const std::uint64_t seed = derive_seed(master_seed, kTagSweepData, k);
    scores[job] =
        run_single(g, sel, alpha_grid[ai], task, lambda, seed, washout_steps)
            .balanced_accuracy;
  });

  AlphaSweepResult result;
  result.rows.reserve(alpha_grid.size());
  for (std::size_t ai = 0; ai < alpha_grid.size(); ++ai) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n_val_seeds; ++k) sum += scores[ai * n_val_seeds + k];
    result.rows.push_back({alpha_grid[ai], sum / static_cast<double>(n_val_seeds)});
  }
  result.best_alpha = result.rows.front().alpha;
  double best_score = result.rows.front().mean_balanced_accuracy;
  for (const AlphaSweepRow& row : result.rows) {
    if (row.mean_balanced_accuracy > best_score ||
        (row.mean_balanced_accuracy == best_score && row.alpha < result.best_alpha)) {
      best_score = row.mean_balanced_accuracy;
      result.best_alpha = row.alpha;
    }
  }
  return result;
}

PerturbationTrace perturbation_run(const WeightedDigraph& g, const ExperimentConfig& cfg,
                                   double alpha, std::size_t rep_index) {
  validate_config(cfg);
  if (g.node_count() < 9 + cfg.deletions_per_step) {
    throw std::runtime_error("perturbation_run: graph too small (" +
                             std::to_string(g.node_count()) + " nodes, need at least " +
                             std::to_string(9 + cfg.deletions_per_step) + ")");
  }

  PerturbationTrace trace;
  trace.repetition = rep_index;
  trace.alpha = alpha;
  trace.selection_seed = derive_seed(cfg.master_seed, kTagSelect, rep_index);
  trace.dataset_seed = derive_seed(cfg.master_seed, kTagData, rep_index);
  trace.perturbation_seed = derive_seed(cfg.master_seed, kTagPerturb, rep_index);

  trace.selection = select_nodes(g, cfg.strategy, trace.selection_seed);
  for (std::size_t i : trace.selection.input_nodes) trace.input_labels.push_back(g.nodes[i].id);
  for (std::size_t i : trace.selection.output_nodes) {
    trace.output_labels.push_back(g.nodes[i].id);
  }

  const TaskDataset dataset = generate(with_seed(cfg.task, trace.dataset_seed));
  const auto [train, test] = split_by_trial(dataset, kTrainFraction);

  Esn esn = build_esn(g, trace.selection, EsnConfig{alpha, 0});
  trace.steps.push_back(
      {{}, {}, evaluate_esn(esn, train, test, cfg.lambda, cfg.washout_steps)});

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (!trace.selection.contains(i)) eligible.push_back(i);
  }

  Rng perturb_rng(trace.perturbation_seed);
  for (std::size_t step = 0; step < cfg.max_steps; ++step) {
    if (eligible.size() < cfg.deletions_per_step) break;
    const std::vector<std::size_t> positions =
        perturb_rng.sample_indices(eligible.size(), cfg.deletions_per_step);

    StepRecord rec;
    for (std::size_t pos : positions) {
      rec.deleted_nodes.push_back(eligible[pos]);
      rec.deleted_labels.push_back(g.nodes[eligible[pos]].id);
    }
    std::vector<std::size_t> sorted_positions = positions;
    std::sort(sorted_positions.rbegin(), sorted_positions.rend());
    for (std::size_t pos : sorted_positions) eligible.erase(eligible.begin() + pos);

    esn = zero_out_nodes(esn, rec.deleted_nodes);
    if (cfg.rescale_after_perturbation) rescale_to_alpha(esn, alpha);
    rec.report = evaluate_esn(esn, train, test, cfg.lambda, cfg.washout_steps);
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
  validate_config(cfg);

  WeightedDigraph g = load_graph(cfg.graph_path);
  if (!cfg.nodes_path.empty()) {
    std::ifstream in(cfg.nodes_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open node metadata: " + cfg.nodes_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    g = parse_node_metadata(text, g).graph;
  }

  ExperimentResult result;
  result.config = cfg;

  const NodeSelection sweep_sel =
      select_nodes(g, cfg.strategy, derive_seed(cfg.master_seed, kTagSweepSelect, 0));
  result.sweep = alpha_sweep(g, sweep_sel, cfg.task, cfg.alpha_grid, cfg.lambda,
                             cfg.master_seed, cfg.validation_seeds, jobs, cfg.washout_steps);
  const double best_alpha = result.sweep.best_alpha;

  result.traces.resize(cfg.repetitions);
  parallel_for(cfg.repetitions, jobs, [&](std::size_t rep) {
    result.traces[rep] = perturbation_run(g, cfg, best_alpha, rep);
  });

  if (cfg.null_model) {
    result.null_rewire_seed = derive_seed(cfg.master_seed, kTagRewire, 0);
    const WeightedDigraph null_graph =
        rewire_null_model(g, result.null_rewire_seed, cfg.swap_factor);
    result.null_traces.resize(cfg.repetitions);
    parallel_for(cfg.repetitions, jobs, [&](std::size_t rep) {
      result.null_traces[rep] = perturbation_run(null_graph, cfg, best_alpha, rep);
    });
  }
  return result;
}

std::vector<AggregateRow> aggregate(const std::vector<PerturbationTrace>& traces) {
  std::size_t max_steps = 0;
  for (const PerturbationTrace& t : traces) max_steps = std::max(max_steps, t.steps.size());

  std::vector<AggregateRow> rows;
  for (std::size_t s = 0; s < max_steps; ++s) {
    std::vector<const MetricReport*> reports;
    for (const PerturbationTrace& t : traces) {
      if (s < t.steps.size()) reports.push_back(&t.steps[s].report);
    }
    AggregateRow row;
    row.step = s;
    row.n = reports.size();
    auto stats = [&](auto member, double& mean, double& stddev) {
      double sum = 0.0;
      for (const MetricReport* r : reports) sum += r->*member;
      mean = sum / static_cast<double>(reports.size());
      if (reports.size() < 2) {
        stddev = 0.0;
        return;
      }
      double sq = 0.0;
      for (const MetricReport* r : reports) {
        const double d = r->*member - mean;
        sq += d * d;
      }
      stddev = std::sqrt(sq / static_cast<double>(reports.size() - 1));
    };
    stats(&MetricReport::balanced_accuracy, row.mean_balanced_accuracy,
          row.std_balanced_accuracy);
    stats(&MetricReport::f1_macro, row.mean_f1_macro, row.std_f1_macro);
    stats(&MetricReport::filtered_accuracy, row.mean_filtered_accuracy,
          row.std_filtered_accuracy);
    rows.push_back(row);
  }
  return rows;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["graph_path"] = cfg.graph_path;
  j["nodes_path"] = cfg.nodes_path;
  j["task"] = task_to_json(cfg.task);
  j["strategy"] = strategy_string(cfg.strategy);
  j["alpha_grid"] = cfg.alpha_grid;
  j["lambda"] = cfg.lambda;
  j["washout_steps"] = cfg.washout_steps;
  j["deletions_per_step"] = cfg.deletions_per_step;
  j["max_steps"] = cfg.max_steps;
  j["repetitions"] = cfg.repetitions;
  j["validation_seeds"] = cfg.validation_seeds;
  j["master_seed"] = cfg.master_seed;
  j["rescale_after_perturbation"] = cfg.rescale_after_perturbation;
  j["null_model"] = cfg.null_model;
  j["swap_factor"] = cfg.swap_factor;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: top level must be an object");
  reject_unknown_keys(j,
                      {"graph_path", "nodes_path", "task", "strategy", "alpha_grid", "lambda",
                       "washout_steps", "deletions_per_step", "max_steps", "repetitions",
                       "validation_seeds", "master_seed", "rescale_after_perturbation",
                       "null_model", "swap_factor", "derived"},
                      "");

  ExperimentConfig cfg;
  if (!j.contains("graph_path")) throw std::runtime_error("config: graph_path is required");
  cfg.graph_path = j.at("graph_path").get<std::string>();
  cfg.nodes_path = j.value("nodes_path", std::string());
  if (!j.contains("task")) throw std::runtime_error("config: task is required");
  cfg.task = task_from_json(j.at("task"));
  if (j.contains("strategy")) {
    cfg.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  }
  cfg.alpha_grid = j.value("alpha_grid", cfg.alpha_grid);
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.washout_steps = j.value("washout_steps", cfg.washout_steps);
  cfg.deletions_per_step = j.value("deletions_per_step", cfg.deletions_per_step);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  cfg.repetitions = j.value("repetitions", cfg.repetitions);
  cfg.validation_seeds = j.value("validation_seeds", cfg.validation_seeds);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.rescale_after_perturbation =
      j.value("rescale_after_perturbation", cfg.rescale_after_perturbation);
  cfg.null_model = j.value("null_model", cfg.null_model);
  cfg.swap_factor = j.value("swap_factor", cfg.swap_factor);
  validate_config(cfg);
  return cfg;
}

void write_results(const ExperimentResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + dir.string());

  // config.json: the resolved config plus a provenance block that
  // config_from_json ignores on re-load.
  nlohmann::ordered_json cfg_json =
      nlohmann::ordered_json::parse(config_to_json(result.config));
  nlohmann::ordered_json derived;
  derived["best_alpha"] = result.sweep.best_alpha;
  if (result.config.null_model) derived["null_rewire_seed"] = result.null_rewire_seed;
  auto trace_info = [](const PerturbationTrace& t) {
    nlohmann::ordered_json j;
    j["repetition"] = t.repetition;
    j["selection_seed"] = t.selection_seed;
    j["dataset_seed"] = t.dataset_seed;
    j["perturbation_seed"] = t.perturbation_seed;
    j["input_nodes"] = t.input_labels;
    j["output_nodes"] = t.output_labels;
    return j;
  };
  derived["repetitions"] = nlohmann::ordered_json::array();
  for (const PerturbationTrace& t : result.traces) {
    derived["repetitions"].push_back(trace_info(t));
  }
  if (!result.null_traces.empty()) {
    derived["null_repetitions"] = nlohmann::ordered_json::array();
    for (const PerturbationTrace& t : result.null_traces) {
      derived["null_repetitions"].push_back(trace_info(t));
    }
  }
  cfg_json["derived"] = derived;
  write_file(dir / "config.json", cfg_json.dump(2) + "\n");

  std::string sweep_csv = "alpha,mean_balanced_accuracy\n";
  for (const AlphaSweepRow& row : result.sweep.rows) {
    sweep_csv += csv::format_double(row.alpha);
    sweep_csv += ',';
    sweep_csv += csv::format_double(row.mean_balanced_accuracy);
    sweep_csv += '\n';
  }
  write_file(dir / "alpha_sweep.csv", sweep_csv);

  for (const PerturbationTrace& t : result.traces) {
    write_file(dir / ("trace_rep" + std::to_string(t.repetition) + ".csv"), trace_csv(t));
  }
  for (const PerturbationTrace& t : result.null_traces) {
    write_file(dir / ("trace_null_rep" + std::to_string(t.repetition) + ".csv"),
               trace_csv(t));
  }

  std::string agg_csv =
      "model,step,balanced_accuracy_mean,balanced_accuracy_std,f1_macro_mean,f1_macro_std,"
      "filtered_accuracy_mean,filtered_accuracy_std,n_reps\n";
  append_aggregate_rows(agg_csv, "real", aggregate(result.traces));
  if (!result.null_traces.empty()) {
    append_aggregate_rows(agg_csv, "null", aggregate(result.null_traces));
  }
  write_file(dir / "aggregate.csv", agg_csv);

  if (!result.traces.empty()) {
    struct MetricDef {
      const char* name;
      double MetricReport::*member;
    };
    const MetricDef defs[] = {
        {"balanced_accuracy", &MetricReport::balanced_accuracy},
        {"f1_macro", &MetricReport::f1_macro},
        {"filtered_accuracy", &MetricReport::filtered_accuracy},
    };
    for (const MetricDef& def : defs) {
      std::vector<PlotSeries> series;
      for (const PerturbationTrace& t : result.traces) {
        PlotSeries s;
        s.label = "rep " + std::to_string(t.repetition);
        for (const StepRecord& rec : t.steps) s.values.push_back(rec.report.*def.member);
        series.push_back(std::move(s));
      }
      for (const PerturbationTrace& t : result.null_traces) {
        PlotSeries s;
        s.label = "null rep " + std::to_string(t.repetition);
        s.dashed = true;
        for (const StepRecord& rec : t.steps) s.values.push_back(rec.report.*def.member);
        series.push_back(std::move(s));
      }
      const std::string svg = render_line_svg(std::string(def.name) + " vs perturbation step",
                                              "perturbation step", def.name, series);
      write_file(dir / ("perf_" + std::string(def.name) + ".svg"), svg);
    }
  }
}

}  // namespace netres
