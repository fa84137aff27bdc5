#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "pa3c/dungeon.hpp"
#include "pa3c/learning.hpp"
#include "pa3c/network.hpp"
#include "pa3c/observation.hpp"
#include "pa3c/rewards.hpp"
#include "pa3c/situations.hpp"
#include "pa3c/trainer.hpp"

namespace pa3c {

// Every setting the command-line tool understands. The file form is INI
// with sections [run], [generation], [a3c], [network], [rewards], [eval];
// unknown sections or keys are rejected.
struct RunConfig {
  std::uint64_t seed = 1;
  int workers = 1;
  SituationConfig situations;  // s2
  Encoding encoding = Encoding::C2;
  std::string output_dir = "run";
  std::int64_t checkpoint_interval = 1'000'000;
  double time_limit_seconds = 0.0;
  double cpu_limit_seconds = 0.0;

  GenerationConfig generation;
  Hyperparams hp;
  int conv1_filters = 16;
  int conv2_filters = 32;
  int dense_units = 256;
  int lstm_units = 256;
  RewardConfig rewards;

  int eval_episodes = 200;
  bool eval_argmax = false;

  NetworkSpec network_spec() const;
  TrainConfig train_config() const;

  // Throws ConfigError.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws ConfigError on syntax errors, unknown keys or bad values. Keys not
// present keep their current value in `base`.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

void write_config(std::ostream& out, const RunConfig& config);
void save_config(const std::filesystem::path& path, const RunConfig& config);

// Applies one "section.key=value" override.
void apply_override(RunConfig& config, const std::string& assignment);

}  // namespace pa3c
