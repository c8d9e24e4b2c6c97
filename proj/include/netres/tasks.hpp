#pragma once

// Trial-structured classification benchmarks. Both tasks emit a continuous
// three-channel timeseries (x1 = fixation, x2/x3 = stimulus channels) with a
// per-step label: 0 outside decision periods, the trial's class (1 or 2)
// during them. Trials are concatenated; nothing is reset between trials.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "netres/matrix.hpp"

namespace netres {

enum class TaskName { PerceptualDecision, GoNogo };

std::string task_name_string(TaskName name);
TaskName task_name_from_string(const std::string& s);

// Perceptual Decision Making: during the stimulus window one channel is
// drawn around 0.5 + coherence/2 and the other around 0.5 - coherence/2; the
// class says which channel wins.
struct PdmParams {
  std::size_t n_trials = 200;
  std::size_t fix_steps = 3;
  std::size_t stim_steps = 20;
  std::size_t decision_steps = 2;
  double noise_sigma = 0.1;
  std::vector<double> coherences = {0.1, 0.2, 0.4, 0.8};
  std::uint64_t seed = 0;
};

// Go/No-go: one channel spikes to 1 during the cue window (x2 = go,
// x3 = no-go); after a delay the class must be reported. The default delay
// is short: the cue trace decays geometrically under the saturating update
// while the stimulus channels keep injecting noise, so long delays leave no
// recoverable class signal at the readout.
struct GoNogoParams {
  std::size_t n_trials = 200;
  std::size_t fix_steps = 3;
  std::size_t cue_steps = 2;
  std::size_t delay_steps = 1;
  std::size_t decision_steps = 2;
  double noise_sigma = 0.05;
  std::uint64_t seed = 0;
};

using TaskParams = std::variant<PdmParams, GoNogoParams>;

TaskName task_of(const TaskParams& params);
std::size_t steps_per_trial(const TaskParams& params);

struct TaskDataset {
  TaskName task = TaskName::PerceptualDecision;
  Matrix inputs;                          // T x 3: fixation, x2, x3
  std::vector<int> labels;                // length T, values in {0,1,2}
  std::vector<std::size_t> trial_starts;  // ascending, first is 0

  std::size_t step_count() const { return labels.size(); }
  std::size_t trial_count() const { return trial_starts.size(); }
};

TaskDataset generate_pdm(const PdmParams& params);
TaskDataset generate_gonogo(const GoNogoParams& params);
TaskDataset generate(const TaskParams& params);

// First ceil(train_frac * n_trials) trials become the train split, the rest
// the test split. Throws if either side would be empty.
std::pair<TaskDataset, TaskDataset> split_by_trial(const TaskDataset& d, double train_frac);

// `t,x1,x2,x3,y` rows for inspection and plotting.
std::string to_csv(const TaskDataset& d);

}  // namespace netres
