#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "pa3c/agent.hpp"
#include "pa3c/checkpoint.hpp"
#include "pa3c/dungeon.hpp"
#include "pa3c/learning.hpp"
#include "pa3c/network.hpp"
#include "pa3c/rewards.hpp"
#include "pa3c/situations.hpp"

namespace pa3c {

struct TrainConfig {
  SituationConfig situations;
  Encoding encoding = Encoding::C2;
  NetworkSpec network = NetworkSpec::standard(Encoding::C2);
  Hyperparams hp;
  GenerationConfig generation;
  RewardConfig rewards;
  int workers = 1;
  std::uint64_t seed = 1;
  // Global steps between checkpoints; 0 writes only the final one.
  std::int64_t checkpoint_interval = 1'000'000;
  // Stop after this much wall time even if max_global_steps is not reached;
  // 0 disables. A time-limited run is not reproducible.
  double time_limit_seconds = 0.0;
  // Same, measured in process CPU time summed over all threads.
  double cpu_limit_seconds = 0.0;
  std::filesystem::path output_dir = "run";

  // Throws ConfigError.
  void validate() const;
};

// Global parameter and RMSProp statistics per situation. Reads copy a
// consistent snapshot and updates are applied under a per-situation lock;
// different situations never contend.
class SharedStore {
 public:
  SharedStore(const SituationConfig& situations, const NetworkSpec& spec, std::uint64_t seed);
  explicit SharedStore(const Checkpoint& ckpt);

  void read(SituationId id, Eigen::VectorXf& out) const;
  RmsPropResult apply(SituationId id, const Eigen::VectorXf& grads, double lr,
                      const Hyperparams& hp);

  std::atomic<std::int64_t>& global_step() { return global_step_; }
  std::int64_t global_step_value() const { return global_step_.load(); }

  Checkpoint snapshot(Encoding encoding) const;

 private:
  struct Slot {
    SituationId id;
    Eigen::VectorXf params;
    Eigen::VectorXf mean_square;
    mutable std::mutex mutex;
  };
  Slot& slot(SituationId id);
  const Slot& slot(SituationId id) const;

  SituationConfig situations_;
  NetworkSpec spec_;
  std::vector<std::unique_ptr<Slot>> slots_;
  std::atomic<std::int64_t> global_step_{0};
};

// Per-episode line of the metrics log.
struct EpisodeMetrics {
  std::int64_t global_step = 0;
  std::int64_t episode = 0;
  std::string situation_config;
  double total_return = 0.0;
  int steps = 0;
  bool success = false;
};

std::string to_json_line(const EpisodeMetrics& m);

struct TrainSummary {
  std::int64_t global_steps = 0;
  std::int64_t episodes = 0;
  double cpu_seconds = 0.0;
  std::int64_t updates = 0;
  std::int64_t skipped_updates = 0;
  std::vector<std::filesystem::path> checkpoints;
  std::filesystem::path metrics_log;
  std::filesystem::path final_checkpoint;
};

// Asynchronous partitioned actor-critic training. Each worker owns an
// environment and local copies of every situational network; segments end
// at t_max steps, at a situation switch (bootstrapping from the incoming
// network's value) or at episode end. Files land in config.output_dir:
// metrics.jsonl, ckpt-<T>.pa3c at each interval, final.pa3c.
// Throws CheckpointError when a checkpoint cannot be written; a worker
// exception aborts the run and is rethrown.
TrainSummary train(const TrainConfig& config);

// Environment side of a running episode.
struct EpisodeState {
  Episode episode;
  EpisodeLedger ledger;
  double total_return = 0.0;
  bool succeeded = false;

  static EpisodeState start(std::uint64_t seed, const GenerationConfig& generation);
  bool done() const { return episode.level.terminal; }
};

struct CollectedSegment {
  Segment<float> segment;
  double bootstrap = 0.0;  // value of the state after the last step; 0 if terminal
  bool terminal = false;
  SituationId next_situation = 4;
};

// Picks an action index given the acting network's output.
using ActionChooser = std::function<int(const ForwardResult<float>&)>;

// Rolls the episode forward with the network of `situation` until t_max
// steps, a change of situation, or the end of the episode. The bootstrap
// comes from the network owning the next state (which may differ from the
// acting one). Advances the acting network's recurrent state and the
// agent's previous action/reward.
CollectedSegment collect_segment(PartitionedAgent& agent, EpisodeState& env, SituationId situation,
                                 int t_max, const ActionChooser& choose,
                                 const RewardConfig& rewards);

}  // namespace pa3c
