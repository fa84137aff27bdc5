#include "pa3c/learning.hpp"

#include <cmath>

#include "pa3c/errors.hpp"

namespace pa3c {

void Hyperparams::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
  if (!(entropy_beta >= 0.0)) throw ConfigError("entropy_beta must be non-negative");
  if (t_max < 1) throw ConfigError("t_max must be positive");
  if (!(initial_lr > 0.0)) throw ConfigError("initial_lr must be positive");
  if (max_global_steps < 1) throw ConfigError("max_global_steps must be positive");
  if (!(rms_decay > 0.0 && rms_decay < 1.0)) throw ConfigError("rms_decay must be in (0, 1)");
  if (rms_momentum != 0.0) throw ConfigError("only rms_momentum = 0 is supported");
  if (!(rms_epsilon > 0.0)) throw ConfigError("rms_epsilon must be positive");
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be positive");
  if (!(value_weight > 0.0)) throw ConfigError("value_weight must be positive");
}

std::vector<double> n_step_returns(std::span<const double> rewards, double bootstrap, bool terminal,
                                   double gamma) {
  if (rewards.empty()) throw ContractViolation("n_step_returns needs at least one reward");
  std::vector<double> out(rewards.size());
  double next = terminal ? 0.0 : bootstrap;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    next = rewards[i] + gamma * next;
    out[i] = next;
  }
  return out;
}

double anneal_lr(double initial_lr, std::int64_t global_step, std::int64_t max_global_steps) {
  if (global_step >= max_global_steps) return 0.0;
  if (global_step <= 0) return initial_lr;
  return initial_lr * static_cast<double>(max_global_steps - global_step) /
         static_cast<double>(max_global_steps);
}

namespace {

template <typename Scalar>
int sample_impl(std::span<const Scalar> policy, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cumulative = 0.0;
  int last_nonzero = 0;
  for (int a = 0; a < static_cast<int>(policy.size()); ++a) {
    if (policy[a] <= Scalar(0)) continue;
    last_nonzero = a;
    cumulative += static_cast<double>(policy[a]);
    if (u < cumulative) return a;
  }
  return last_nonzero;
}

}  // namespace

int sample_action(std::span<const float> policy, std::mt19937_64& rng) {
  return sample_impl(policy, rng);
}

int sample_action(std::span<const double> policy, std::mt19937_64& rng) {
  return sample_impl(policy, rng);
}

template <typename Scalar>
RmsPropResult rmsprop_update(Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> params,
                             Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> mean_square,
                             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& grads, double lr,
                             const Hyperparams& hp) {
  if (params.size() != grads.size() || mean_square.size() != grads.size()) {
    throw ContractViolation("gradient shape does not match parameters");
  }
  RmsPropResult result;
  const double sq = grads.template cast<double>().squaredNorm();
  result.grad_norm = std::sqrt(sq);
  if (!std::isfinite(result.grad_norm)) return result;

  double scale = 1.0;
  if (result.grad_norm > hp.clip_norm) {
    scale = hp.clip_norm / result.grad_norm;
    result.clipped = true;
  }
  const Scalar s = static_cast<Scalar>(scale);
  const Scalar decay = static_cast<Scalar>(hp.rms_decay);
  const Scalar one_minus = static_cast<Scalar>(1.0 - hp.rms_decay);
  const Scalar eps = static_cast<Scalar>(hp.rms_epsilon);
  const Scalar alpha = static_cast<Scalar>(lr);
  for (Eigen::Index i = 0; i < grads.size(); ++i) {
    const Scalar g = grads[i] * s;
    mean_square[i] = decay * mean_square[i] + one_minus * g * g;
    params[i] -= alpha * g / std::sqrt(mean_square[i] + eps);
  }
  result.applied = true;
  return result;
}

template RmsPropResult rmsprop_update<float>(Eigen::Ref<Eigen::VectorXf>, Eigen::Ref<Eigen::VectorXf>,
                                             const Eigen::VectorXf&, double, const Hyperparams&);
template RmsPropResult rmsprop_update<double>(Eigen::Ref<Eigen::VectorXd>,
                                              Eigen::Ref<Eigen::VectorXd>, const Eigen::VectorXd&,
                                              double, const Hyperparams&);

}  // namespace pa3c
