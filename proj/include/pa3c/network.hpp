#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pa3c/dungeon.hpp"
#include "pa3c/observation.hpp"
#include "pa3c/situations.hpp"

namespace pa3c {

// Tower (conv 3x3 -> conv 3x3 -> dense, all ReLU, valid padding, stride 1)
// feeding an LSTM together with the previous action one-hot and previous
// reward; the LSTM output drives a softmax policy head and a linear value head.
struct NetworkSpec {
  int input_channels = 1;
  int conv1_filters = 16;
  int conv2_filters = 32;
  int dense_units = 256;
  int lstm_units = 256;

  static constexpr int kKernel = 3;
  static constexpr int kConv1Size = kViewSize - kKernel + 1;   // 15
  static constexpr int kConv2Size = kConv1Size - kKernel + 1;  // 13

  int flat_size() const { return kConv2Size * kConv2Size * conv2_filters; }
  int lstm_input_size() const { return dense_units + kNumActions + 1; }

  static NetworkSpec standard(Encoding encoding) {
    NetworkSpec s;
    s.input_channels = channels(encoding);
    return s;
  }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

// One named parameter array inside the flat parameter vector. Matrices are
// stored column-major with shape {rows, cols}.
struct ParamEntry {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

class ParamLayout {
 public:
  explicit ParamLayout(const NetworkSpec& spec);

  const std::vector<ParamEntry>& entries() const { return entries_; }
  std::size_t total_size() const { return total_; }
  // Throws std::out_of_range for unknown names.
  const ParamEntry& find(const std::string& name) const;

 private:
  void add(std::string name, std::vector<int> shape);

  std::vector<ParamEntry> entries_;
  std::size_t total_ = 0;
};

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct RecurrentState {
  Vector<Scalar> h;
  Vector<Scalar> c;

  static RecurrentState zeros(int units) {
    return {Vector<Scalar>::Zero(units), Vector<Scalar>::Zero(units)};
  }
  friend bool operator==(const RecurrentState&, const RecurrentState&) = default;
};

template <typename Scalar>
struct ForwardResult {
  std::array<Scalar, kNumActions> policy{};
  Scalar value = 0;
  RecurrentState<Scalar> state;
};

// No previous action (episode start) is encoded as an all-zero one-hot.
inline constexpr int kNoAction = -1;

struct Transition {
  Observation obs;
  SituationId situation = 4;
  int prev_action = kNoAction;
  double prev_reward = 0.0;
  int action = 0;
  double reward = 0.0;
  bool terminal = false;
};

// A rollout slice handled by one situational network, together with the
// recurrent state that network held before the first step.
template <typename Scalar>
struct Segment {
  SituationId situation = 4;
  RecurrentState<Scalar> initial_state;
  std::vector<Transition> steps;
};

struct LossWeights {
  double entropy_beta = 0.001;
  double value_weight = 0.5;
};

template <typename Scalar>
struct LossResult {
  Scalar loss = 0;
  Scalar policy_loss = 0;
  Scalar value_loss = 0;
  Scalar entropy = 0;  // summed over steps
  std::vector<double> advantages;  // R_t - V(s_t) per step
  Vector<Scalar> grads;  // same layout as the parameters
};

template <typename Scalar>
class Network {
 public:
  explicit Network(const NetworkSpec& spec);

  const NetworkSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return layout_; }
  Vector<Scalar>& params() { return params_; }
  const Vector<Scalar>& params() const { return params_; }

  // Weights uniform in +-1/sqrt(fan_in), biases zero.
  void initialize(std::uint64_t seed);

  RecurrentState<Scalar> zero_state() const { return RecurrentState<Scalar>::zeros(spec_.lstm_units); }

  // Throws ContractViolation on shape mismatch.
  ForwardResult<Scalar> forward(const Observation& obs, int prev_action, double prev_reward,
                                const RecurrentState<Scalar>& state) const;

  // Sum over the segment of
  //   -log pi(a_t|s_t) * A_t - beta * H(pi(.|s_t)) + value_weight * (R_t - V(s_t))^2
  // with the advantage A_t = R_t - V(s_t) held constant, and its exact
  // gradient through the unrolled recurrence (no gradient into the initial
  // state). Throws ContractViolation when returns and steps are misaligned.
  //
  // A non-empty `fixed_advantages` replaces R_t - V(s_t) in the policy term
  // only. The gradient is the same either way; it lets a numerical check
  // differentiate the loss with the advantage frozen.
  LossResult<Scalar> loss_and_grads(const Segment<Scalar>& segment, std::span<const double> returns,
                                    const LossWeights& weights, bool with_grads = true,
                                    std::span<const double> fixed_advantages = {}) const;

 private:
  struct TowerCache;

  void check_observation(const Observation& obs) const;
  void tower_forward(std::span<const Observation* const> obs, TowerCache& cache) const;

  NetworkSpec spec_;
  ParamLayout layout_;
  Vector<Scalar> params_;
};

extern template class Network<float>;
extern template class Network<double>;

}  // namespace pa3c
