#include "pa3c/agent.hpp"

#include "pa3c/errors.hpp"

namespace pa3c {

PartitionedAgent::PartitionedAgent(const SituationConfig& situations, Encoding encoding,
                                   const NetworkSpec& spec)
    : situations_(situations), encoding_(encoding), spec_(spec) {
  if (spec.input_channels != channels(encoding)) {
    throw ContractViolation("network input channels do not match the encoding");
  }
  for (SituationId id : situations.active_set()) {
    slots_.emplace(id, Slot{Network<float>(spec), RecurrentState<float>::zeros(spec.lstm_units)});
  }
}

PartitionedAgent PartitionedAgent::from_checkpoint(const Checkpoint& ckpt) {
  PartitionedAgent agent(ckpt.situations, ckpt.encoding, ckpt.spec);
  for (auto& [id, slot] : agent.slots_) slot.net.params() = ckpt.slot(id).params;
  return agent;
}

PartitionedAgent::Slot& PartitionedAgent::slot(SituationId id) {
  auto it = slots_.find(id);
  if (it == slots_.end()) {
    throw ContractViolation("situation " + std::to_string(id) + " has no network");
  }
  return it->second;
}

const PartitionedAgent::Slot& PartitionedAgent::slot(SituationId id) const {
  return const_cast<PartitionedAgent*>(this)->slot(id);
}

Network<float>& PartitionedAgent::network(SituationId id) { return slot(id).net; }
const Network<float>& PartitionedAgent::network(SituationId id) const { return slot(id).net; }
RecurrentState<float>& PartitionedAgent::state(SituationId id) { return slot(id).state; }

void PartitionedAgent::begin_episode() {
  for (auto& [id, s] : slots_) s.state = RecurrentState<float>::zeros(spec_.lstm_units);
  prev_action_ = kNoAction;
  prev_reward_ = 0.0;
}

ForwardResult<float> PartitionedAgent::evaluate(SituationId id, const Observation& obs) const {
  const Slot& s = slot(id);
  return s.net.forward(obs, prev_action_, prev_reward_, s.state);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace pa3c
