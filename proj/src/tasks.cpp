#include "netres/tasks.hpp"

#include <cmath>
#include <stdexcept>

#include "netres/csv.hpp"
#include "netres/rng.hpp"

namespace netres {

namespace {

void check_common(std::size_t n_trials, double noise_sigma) {
  if (n_trials < 2) throw std::invalid_argument("task params: n_trials must be >= 2");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("task params: noise_sigma must be >= 0");
}

}  // namespace

std::string task_name_string(TaskName name) {
  return name == TaskName::PerceptualDecision ? "pdm" : "gonogo";
}

TaskName task_name_from_string(const std::string& s) {
  if (s == "pdm") return TaskName::PerceptualDecision;
  if (s == "gonogo") return TaskName::GoNogo;
  throw std::invalid_argument("unknown task '" + s + "' (expected pdm or gonogo)");
}

TaskName task_of(const TaskParams& params) {
  return std::holds_alternative<PdmParams>(params) ? TaskName::PerceptualDecision
                                                   : TaskName::GoNogo;
}

std::size_t steps_per_trial(const TaskParams& params) {
  if (const auto* p = std::get_if<PdmParams>(&params)) {
    return p->fix_steps + p->stim_steps + p->decision_steps;
  }
  const auto& p = std::get<GoNogoParams>(params);
  return p.fix_steps + p.cue_steps + p.delay_steps + p.decision_steps;
}

TaskDataset generate_pdm(const PdmParams& params) {
  check_common(params.n_trials, params.noise_sigma);
  if (params.fix_steps < 1 || params.stim_steps < 1 || params.decision_steps < 1) {
    throw std::invalid_argument("pdm params: all segment lengths must be >= 1");
  }
  if (params.coherences.empty()) {
    throw std::invalid_argument("pdm params: coherence set must be nonempty");
  }
  for (double c : params.coherences) {
    if (!(c > 0.0 && c <= 1.0)) {
      throw std::invalid_argument("pdm params: coherences must lie in (0,1]");
    }
  }

  const std::size_t steps = params.fix_steps + params.stim_steps + params.decision_steps;
  TaskDataset d;
  d.task = TaskName::PerceptualDecision;
  d.inputs = Matrix(params.n_trials * steps, 3);
  d.labels.assign(params.n_trials * steps, 0);
  d.trial_starts.reserve(params.n_trials);

  Rng rng(params.seed);
  std::size_t t = 0;
  for (std::size_t trial = 0; trial < params.n_trials; ++trial) {
    d.trial_starts.push_back(t);
    const int cls = 1 + static_cast<int>(rng.below(2));
    const double coh = params.coherences[rng.below(params.coherences.size())];
    const double win_mean = 0.5 + coh / 2.0;
    const double lose_mean = 0.5 - coh / 2.0;
    for (std::size_t s = 0; s < steps; ++s, ++t) {
      const bool in_stim = s >= params.fix_steps && s < params.fix_steps + params.stim_steps;
      const bool in_decision = s >= params.fix_steps + params.stim_steps;
      d.inputs(t, 0) = in_decision ? 0.0 : 1.0;
      if (in_stim) {
        d.inputs(t, 1) = rng.normal(cls == 1 ? win_mean : lose_mean, params.noise_sigma);
        d.inputs(t, 2) = rng.normal(cls == 1 ? lose_mean : win_mean, params.noise_sigma);
      } else {
        d.inputs(t, 1) = rng.normal(0.0, params.noise_sigma);
        d.inputs(t, 2) = rng.normal(0.0, params.noise_sigma);
      }
      if (in_decision) d.labels[t] = cls;
    }
  }
  return d;
}

TaskDataset generate_gonogo(const GoNogoParams& params) {
  check_common(params.n_trials, params.noise_sigma);
  if (params.fix_steps < 1 || params.cue_steps < 1 || params.delay_steps < 1 ||
      params.decision_steps < 1) {
    throw std::invalid_argument("gonogo params: all segment lengths must be >= 1");
  }

  const std::size_t steps =
      params.fix_steps + params.cue_steps + params.delay_steps + params.decision_steps;
  TaskDataset d;
  d.task = TaskName::GoNogo;
  d.inputs = Matrix(params.n_trials * steps, 3);
  d.labels.assign(params.n_trials * steps, 0);
  d.trial_starts.reserve(params.n_trials);

  Rng rng(params.seed);
  std::size_t t = 0;
  for (std::size_t trial = 0; trial < params.n_trials; ++trial) {
    d.trial_starts.push_back(t);
    const int cls = 1 + static_cast<int>(rng.below(2));  // 1 = go, 2 = no-go
    for (std::size_t s = 0; s < steps; ++s, ++t) {
      const bool in_cue = s >= params.fix_steps && s < params.fix_steps + params.cue_steps;
      const bool in_decision = s >= steps - params.decision_steps;
      d.inputs(t, 0) = in_decision ? 0.0 : 1.0;
      if (in_cue) {
        d.inputs(t, 1) = cls == 1 ? 1.0 : 0.0;
        d.inputs(t, 2) = cls == 2 ? 1.0 : 0.0;
      } else {
        d.inputs(t, 1) = rng.normal(0.0, params.noise_sigma);
        d.inputs(t, 2) = rng.normal(0.0, params.noise_sigma);
      }
      if (in_decision) d.labels[t] = cls;
    }
  }
  return d;
}

TaskDataset generate(const TaskParams& params) {
  if (const auto* p = std::get_if<PdmParams>(&params)) return generate_pdm(*p);
  return generate_gonogo(std::get<GoNogoParams>(params));
}

std::pair<TaskDataset, TaskDataset> split_by_trial(const TaskDataset& d, double train_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw std::invalid_argument("split_by_trial: train_frac must lie in (0,1)");
  }
  const std::size_t n = d.trial_count();
  const std::size_t n_train =
      static_cast<std::size_t>(std::ceil(train_frac * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw std::runtime_error("split_by_trial: split leaves an empty side");
  }

  auto slice = [&](std::size_t first_trial, std::size_t last_trial) {
    const std::size_t begin = d.trial_starts[first_trial];
    const std::size_t end =
        last_trial < n ? d.trial_starts[last_trial] : d.step_count();
    TaskDataset out;
    out.task = d.task;
    out.inputs = Matrix(end - begin, 3);
    out.labels.assign(d.labels.begin() + begin, d.labels.begin() + end);
    for (std::size_t t = begin; t < end; ++t) {
      for (std::size_t c = 0; c < 3; ++c) out.inputs(t - begin, c) = d.inputs(t, c);
    }
    for (std::size_t k = first_trial; k < last_trial; ++k) {
      out.trial_starts.push_back(d.trial_starts[k] - begin);
    }
    return out;
  };

  return {slice(0, n_train), slice(n_train, n)};
}

std::string to_csv(const TaskDataset& d) {
  std::string out = "t,x1,x2,x3,y\n";
  for (std::size_t t = 0; t < d.step_count(); ++t) {
    out += std::to_string(t);
    for (std::size_t c = 0; c < 3; ++c) {
      out += ',';
      out += csv::format_double(d.inputs(t, c));
    }
    out += ',';
    out += std::to_string(d.labels[t]);
    out += '\n';
  }
  return out;
}

}  // namespace netres
