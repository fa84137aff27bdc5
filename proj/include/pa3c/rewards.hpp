#pragma once

#include <set>

#include "pa3c/dungeon.hpp"

namespace pa3c {

struct RewardConfig {
  double door_use = 1.0;
  double door_discovery = 1.0;
  double descend = 10.0;
  double blocked = -0.01;

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

// Doors already rewarded in the current episode.
struct EpisodeLedger {
  std::set<Pos> doors_used;
  std::set<Pos> doors_seen;

  // Doors visible at episode start count as seen; they were not found by an action.
  static EpisodeLedger from_start(const KnownMap& start);
};

struct RewardBreakdown {
  double door_use = 0.0;
  double door_discovery = 0.0;
  double descend = 0.0;
  double blocked = 0.0;

  double total() const { return door_use + door_discovery + descend + blocked; }
  double door_part() const { return door_use + door_discovery; }
};

// Shaped reward of one transition pre -> post. Updates the ledger in place.
RewardBreakdown compute_reward(const KnownMap& pre, const StepOutcome& outcome,
                               const KnownMap& post, EpisodeLedger& ledger,
                               const RewardConfig& config = {});

}  // namespace pa3c
