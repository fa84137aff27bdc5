#include "pa3c/rewards.hpp"

namespace pa3c {

EpisodeLedger EpisodeLedger::from_start(const KnownMap& start) {
  EpisodeLedger ledger;
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      if (start.grid.at(r, c) == Tile::Door) ledger.doors_seen.insert({r, c});
    }
  }
  return ledger;
}

RewardBreakdown compute_reward(const KnownMap& pre, const StepOutcome& outcome,
                               const KnownMap& post, EpisodeLedger& ledger,
                               const RewardConfig& config) {
  RewardBreakdown reward;

  if (post.under_rogue() == Tile::Door && ledger.doors_used.insert(post.rogue_pos).second) {
    reward.door_use = config.door_use;
  }

  bool found_new = false;
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      if (post.grid.at(r, c) == Tile::Door && pre.grid.at(r, c) != Tile::Door) {
        found_new |= ledger.doors_seen.insert({r, c}).second;
      }
    }
  }
  if (found_new) reward.door_discovery = config.door_discovery;

  if (outcome.kind == OutcomeKind::Descended) reward.descend = config.descend;
  if (outcome.kind == OutcomeKind::Blocked) reward.blocked = config.blocked;
  return reward;
}

}  // namespace pa3c
