#pragma once

#include <cstdint>
#include <map>
#include <memory>

#include "pa3c/checkpoint.hpp"
#include "pa3c/network.hpp"
#include "pa3c/situations.hpp"

namespace pa3c {

// One network per active situation plus the per-episode context each of
// them consumes: its own LSTM state, and the previous action and reward of
// the episode (shared, whichever network acted).
class PartitionedAgent {
 public:
  PartitionedAgent(const SituationConfig& situations, Encoding encoding, const NetworkSpec& spec);

  static PartitionedAgent from_checkpoint(const Checkpoint& ckpt);

  const SituationConfig& situations() const { return situations_; }
  Encoding encoding() const { return encoding_; }
  const NetworkSpec& spec() const { return spec_; }

  Network<float>& network(SituationId id);
  const Network<float>& network(SituationId id) const;

  // Zero LSTM states, no previous action, previous reward 0.
  void begin_episode();

  RecurrentState<float>& state(SituationId id);

  SituationId classify(const KnownMap& known) const { return pa3c::classify(known, situations_); }

  // Forward pass of the situation's network at the current state. Does not
  // advance its recurrent state.
  ForwardResult<float> evaluate(SituationId id, const Observation& obs) const;

  // Records that `action` was taken and earned `reward`.
  void record(int action, double reward) {
    prev_action_ = action;
    prev_reward_ = reward;
  }
  int prev_action() const { return prev_action_; }
  double prev_reward() const { return prev_reward_; }

 private:
  struct Slot {
    Network<float> net;
    RecurrentState<float> state;
  };
  Slot& slot(SituationId id);
  const Slot& slot(SituationId id) const;

  SituationConfig situations_;
  Encoding encoding_;
  NetworkSpec spec_;
  std::map<SituationId, Slot> slots_;
  int prev_action_ = kNoAction;
  double prev_reward_ = 0.0;
};

// 64-bit mixing used to derive independent seeds (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace pa3c
