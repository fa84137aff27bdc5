#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pa3c/dungeon.hpp"

namespace pa3c {

struct Hyperparams {
  double gamma = 0.95;
  double entropy_beta = 0.001;
  int t_max = 60;
  double initial_lr = 0.0007;
  std::int64_t max_global_steps = 50'000'000;
  double rms_decay = 0.99;
  double rms_momentum = 0.0;
  double rms_epsilon = 0.1;
  double clip_norm = 40.0;
  double value_weight = 0.5;

  // Throws ConfigError.
  void validate() const;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

// R_i = r_i + gamma * R_{i+1}; the value after the last reward is the
// bootstrap estimate, or 0 when the segment ends the episode.
// Throws ContractViolation on an empty sequence.
std::vector<double> n_step_returns(std::span<const double> rewards, double bootstrap, bool terminal,
                                   double gamma);

// alpha = eta * (T_max - T) / T_max, clamped at 0 once T passes T_max.
double anneal_lr(double initial_lr, std::int64_t global_step, std::int64_t max_global_steps);

// Draws an action index from a probability vector. Mass lost to rounding
// falls on the last action with nonzero probability.
int sample_action(std::span<const float> policy, std::mt19937_64& rng);
int sample_action(std::span<const double> policy, std::mt19937_64& rng);

template <typename Scalar>
int argmax_action(std::span<const Scalar> policy) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(policy.size()); ++a) {
    if (policy[a] > policy[best]) best = a;
  }
  return best;
}

struct RmsPropResult {
  bool applied = false;
  double grad_norm = 0.0;   // before clipping
  bool clipped = false;
};

// Global-norm clipping to hp.clip_norm, then per coordinate
//   ms <- decay * ms + (1 - decay) * g^2
//   theta <- theta - lr * g / sqrt(ms + epsilon)
// A gradient with a non-finite entry is rejected and nothing changes.
template <typename Scalar>
RmsPropResult rmsprop_update(Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> params,
                             Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> mean_square,
                             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& grads, double lr,
                             const Hyperparams& hp);

}  // namespace pa3c
