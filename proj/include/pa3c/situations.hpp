#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "pa3c/dungeon.hpp"

namespace pa3c {

// Situation ids in priority order: 1 on a corridor (or door), 2 stairs in
// the frames memory, 3 next to a wall, 4 anything else.
using SituationId = int;
inline constexpr int kNumSituations = 4;

enum class SituationConfigName { S1, S2, S4 };

struct SituationConfig {
  SituationConfigName name = SituationConfigName::S2;

  static SituationConfig from_name(std::string_view text);
  std::string_view label() const;
  // Ascending ids that own a network under this configuration.
  std::vector<SituationId> active_set() const;
  bool is_active(SituationId id) const;

  friend bool operator==(const SituationConfig&, const SituationConfig&) = default;
};

struct SituationConditions {
  bool on_corridor = false;
  bool stairs_visible = false;
  bool next_to_wall = false;
};

SituationConditions evaluate_conditions(const KnownMap& known);

SituationId classify(const KnownMap& known, const SituationConfig& config);

}  // namespace pa3c
