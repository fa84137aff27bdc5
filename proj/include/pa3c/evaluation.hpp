#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pa3c/agent.hpp"
#include "pa3c/dungeon.hpp"
#include "pa3c/rewards.hpp"

namespace pa3c {

struct EpisodeRecord {
  int episode = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double total_return = 0.0;  // undiscounted
  int steps = 0;
  int seen_tiles = 0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct EvalReport {
  std::string policy;  // "random" or a checkpoint label
  int episodes = 0;
  double success_rate = 0.0;
  double avg_return = 0.0;
  double avg_seen_tiles = 0.0;
  std::optional<double> avg_steps_to_succeed;  // over successful episodes only
  std::vector<EpisodeRecord> records;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct EvalOptions {
  int episodes = 200;
  std::uint64_t seed = 1;
  GenerationConfig generation;
  RewardConfig rewards;
  // Greedy action selection instead of sampling from the policy.
  bool argmax = false;
};

// Seed of the i-th evaluation level; also used by play/gen helpers.
std::uint64_t episode_seed(std::uint64_t base, int episode);

// Uniformly random actions.
EvalReport evaluate_random(const EvalOptions& options);

// Frozen partitioned policy. Episodes are seeded independently of each other.
EvalReport evaluate_agent(const PartitionedAgent& agent, const EvalOptions& options,
                          const std::string& label = "checkpoint");

// Any callable policy: (known map, rng) -> action. Used by tests and tools.
template <typename Policy>
EvalReport evaluate_policy(Policy&& policy, const EvalOptions& options, const std::string& label);

EvalReport summarize(std::string policy, std::vector<EpisodeRecord> records);

std::string format_summary(const EvalReport& report);
std::string to_json_line(const EpisodeRecord& record);
std::string csv_header();
// One row shaped like the learned-policy results table.
std::string csv_row(const EvalReport& report, const std::string& agent_label);

}  // namespace pa3c

#include "pa3c/evaluation_impl.hpp"
