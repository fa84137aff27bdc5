#pragma once

#include <random>

namespace pa3c {

template <typename Policy>
EvalReport evaluate_policy(Policy&& policy, const EvalOptions& options, const std::string& label) {
  std::vector<EpisodeRecord> records;
  records.reserve(options.episodes);
  for (int i = 0; i < options.episodes; ++i) {
    EpisodeRecord rec;
    rec.episode = i;
    rec.seed = episode_seed(options.seed, i);
    Episode ep = new_episode(rec.seed, options.generation);
    EpisodeLedger ledger = EpisodeLedger::from_start(ep.known);
    std::mt19937_64 rng(mix_seed(rec.seed, 0x5eed));
    while (!ep.level.terminal) {
      const KnownMap pre = ep.known;
      const Action a = policy(ep.known, rng);
      const StepOutcome out = step(ep.level, ep.known, a);
      rec.total_return += compute_reward(pre, out, ep.known, ledger, options.rewards).total();
      if (out.kind == OutcomeKind::Descended) rec.success = true;
    }
    rec.steps = ep.level.step_count;
    rec.seen_tiles = ep.known.grid.count_non_void();
    records.push_back(rec);
  }
  return summarize(label, std::move(records));
}

}  // namespace pa3c
