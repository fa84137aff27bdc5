#include "pa3c/evaluation.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "pa3c/learning.hpp"
#include "pa3c/observation.hpp"

namespace pa3c {

std::uint64_t episode_seed(std::uint64_t base, int episode) {
  return mix_seed(base, static_cast<std::uint64_t>(episode));
}

EvalReport summarize(std::string policy, std::vector<EpisodeRecord> records) {
  EvalReport report;
  report.policy = std::move(policy);
  report.episodes = static_cast<int>(records.size());
  int successes = 0;
  double steps_to_succeed = 0.0;
  for (const EpisodeRecord& r : records) {
    report.avg_return += r.total_return;
    report.avg_seen_tiles += r.seen_tiles;
    if (r.success) {
      ++successes;
      steps_to_succeed += r.steps;
    }
  }
  if (report.episodes > 0) {
    report.success_rate = static_cast<double>(successes) / report.episodes;
    report.avg_return /= report.episodes;
    report.avg_seen_tiles /= report.episodes;
  }
  if (successes > 0) report.avg_steps_to_succeed = steps_to_succeed / successes;
  report.records = std::move(records);
  return report;
}

EvalReport evaluate_random(const EvalOptions& options) {
  return evaluate_policy(
      [](const KnownMap&, std::mt19937_64& rng) {
        return static_cast<Action>(std::uniform_int_distribution<int>(0, kNumActions - 1)(rng));
      },
      options, "random");
}

EvalReport evaluate_agent(const PartitionedAgent& frozen, const EvalOptions& options,
                          const std::string& label) {
  PartitionedAgent agent = frozen;
  std::vector<EpisodeRecord> records;
  records.reserve(options.episodes);
  for (int i = 0; i < options.episodes; ++i) {
    EpisodeRecord rec;
    rec.episode = i;
    rec.seed = episode_seed(options.seed, i);
    Episode ep = new_episode(rec.seed, options.generation);
    EpisodeLedger ledger = EpisodeLedger::from_start(ep.known);
    std::mt19937_64 rng(mix_seed(rec.seed, 0x5eed));
    agent.begin_episode();
    while (!ep.level.terminal) {
      const SituationId sit = agent.classify(ep.known);
      const Observation obs = crop_view(ep.known, agent.encoding());
      const ForwardResult<float> out = agent.evaluate(sit, obs);
      agent.state(sit) = out.state;
      const std::span<const float> policy(out.policy);
      const int a = options.argmax ? argmax_action(policy) : sample_action(policy, rng);
      const KnownMap pre = ep.known;
      const StepOutcome result = step(ep.level, ep.known, static_cast<Action>(a));
      const double r = compute_reward(pre, result, ep.known, ledger, options.rewards).total();
      agent.record(a, r);
      rec.total_return += r;
      if (result.kind == OutcomeKind::Descended) rec.success = true;
    }
    rec.steps = ep.level.step_count;
    rec.seen_tiles = ep.known.grid.count_non_void();
    records.push_back(rec);
  }
  return summarize(label, std::move(records));
}

std::string format_summary(const EvalReport& report) {
  std::ostringstream out;
  out << "policy: " << report.policy << '\n';
  out << "episodes: " << report.episodes << '\n';
  out << "success_rate: " << report.success_rate << '\n';
  out << "avg_return: " << report.avg_return << '\n';
  out << "avg_seen_tiles: " << report.avg_seen_tiles << '\n';
  out << "avg_steps_to_succeed: ";
  if (report.avg_steps_to_succeed) {
    out << *report.avg_steps_to_succeed;
  } else {
    out << "undefined";
  }
  out << '\n';
  return out.str();
}

std::string to_json_line(const EpisodeRecord& record) {
  nlohmann::json j;
  j["episode"] = record.episode;
  j["seed"] = record.seed;
  j["success"] = record.success;
  j["return"] = record.total_return;
  j["steps"] = record.steps;
  j["seen_tiles"] = record.seen_tiles;
  return j.dump();
}

std::string csv_header() {
  return "agent,success_rate,avg_return,avg_seen_tiles,avg_steps_to_succeed";
}

std::string csv_row(const EvalReport& report, const std::string& agent_label) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%.4f,%.2f,%.2f,", agent_label.c_str(), report.success_rate,
                report.avg_return, report.avg_seen_tiles);
  std::string row = buf;
  if (report.avg_steps_to_succeed) {
    std::snprintf(buf, sizeof(buf), "%.2f", *report.avg_steps_to_succeed);
    row += buf;
  }
  return row;
}

}  // namespace pa3c
