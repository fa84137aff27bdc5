#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "pa3c/agent.hpp"
#include "pa3c/checkpoint.hpp"
#include "pa3c/config.hpp"
#include "pa3c/errors.hpp"
#include "pa3c/evaluation.hpp"
#include "pa3c/learning.hpp"
#include "pa3c/observation.hpp"
#include "pa3c/rewards.hpp"
#include "pa3c/screen.hpp"
#include "pa3c/trainer.hpp"

namespace pa3c::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kOutputEnv = "PA3C_OUTPUT_DIR";

struct CommonOptions {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_file, "INI config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", opts.overrides, "Override a config key: section.key=value");
  cmd->add_option("--seed", opts.seed, "Random seed");
}

RunConfig resolve(const CommonOptions& opts) {
  RunConfig config;
  if (!opts.config_file.empty()) config = load_config(opts.config_file);
  for (const std::string& o : opts.overrides) apply_override(config, o);
  if (opts.seed) config.seed = *opts.seed;
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') {
    config.output_dir = env;
  }
  return config;
}

KnownMap fully_revealed(const DungeonLevel& level) {
  KnownMap k;
  k.grid = level.grid;
  k.rogue_pos = level.rogue_pos;
  k.step_count = level.step_count;
  return k;
}

int cmd_gen(const CommonOptions& opts, std::ostream& out) {
  RunConfig config = resolve(opts);
  config.generation.validate();
  const DungeonLevel level = generate_level(config.seed, config.generation);
  out << serialize(render_frame(fully_revealed(level)));
  return kExitOk;
}

struct PlayOptions {
  std::string policy = "random";
  std::string checkpoint;
  std::string actions;
  std::string trace;
  bool full_map = false;
  bool last_only = false;
};

int cmd_play(const CommonOptions& opts, const PlayOptions& play, std::ostream& out) {
  RunConfig config = resolve(opts);
  config.generation.validate();
  std::optional<PartitionedAgent> agent;
  if (!play.checkpoint.empty()) {
    agent = PartitionedAgent::from_checkpoint(load_checkpoint(play.checkpoint));
  } else if (play.policy != "random") {
    throw ConfigError("--policy must be 'random' unless --checkpoint is given");
  }

  std::vector<Action> script;
  for (char c : play.actions) {
    if (c == ' ' || c == ',') continue;
    script.push_back(parse_action(std::string(1, c)));
  }

  Episode ep = new_episode(config.seed, config.generation);
  EpisodeLedger ledger = EpisodeLedger::from_start(ep.known);
  std::mt19937_64 rng(mix_seed(config.seed, 0x5eed));
  if (agent) agent->begin_episode();
  std::ofstream trace;
  if (!play.trace.empty()) {
    trace.open(play.trace, std::ios::trunc);
    if (!trace) throw std::runtime_error("cannot write trace " + play.trace);
    save_config(fs::path(play.trace).replace_extension(".config.ini"), config);
  }

  auto show = [&](const std::string& message) {
    const KnownMap view = play.full_map ? fully_revealed(ep.level) : ep.known;
    out << serialize(render_frame(view, message));
  };
  if (!play.last_only) show("Welcome to the dungeon");

  std::size_t next_scripted = 0;
  double total = 0.0;
  bool success = false;
  while (!ep.level.terminal) {
    if (!script.empty() && next_scripted >= script.size()) break;
    Action a;
    if (!script.empty()) {
      a = script[next_scripted++];
    } else if (agent) {
      const SituationId sit = agent->classify(ep.known);
      const auto fwd = agent->evaluate(sit, crop_view(ep.known, agent->encoding()));
      agent->state(sit) = fwd.state;
      a = static_cast<Action>(sample_action(std::span<const float>(fwd.policy), rng));
    } else {
      a = static_cast<Action>(std::uniform_int_distribution<int>(0, kNumActions - 1)(rng));
    }
    const KnownMap pre = ep.known;
    const StepOutcome result = step(ep.level, ep.known, a);
    const double r = compute_reward(pre, result, ep.known, ledger, config.rewards).total();
    if (agent) agent->record(static_cast<int>(a), r);
    total += r;
    if (result.kind == OutcomeKind::Descended) success = true;
    if (trace.is_open()) {
      trace << to_json_line(TraceRecord{ep.level.step_count, a, result.kind, ep.level.rogue_pos, r})
            << '\n';
    }
    if (!play.last_only) {
      show(std::string(to_string(a)) + ": " + std::string(to_string(result.kind)));
    }
  }
  if (play.last_only) show("");
  out << "steps: " << ep.level.step_count << "  return: " << total
      << "  success: " << (success ? "yes" : "no") << '\n';
  return kExitOk;
}

struct TrainOptions {
  std::optional<std::string> situations;
  std::optional<std::string> encoding;
  std::optional<int> workers;
  std::optional<std::int64_t> steps;
  std::optional<std::string> output;
  std::optional<double> time_limit;
  std::optional<double> cpu_limit;
  std::optional<std::int64_t> checkpoint_interval;
};

int cmd_train(const CommonOptions& opts, const TrainOptions& t, std::ostream& out) {
  RunConfig config = resolve(opts);
  if (t.situations) apply_override(config, "run.situations=" + *t.situations);
  if (t.encoding) apply_override(config, "run.encoding=" + *t.encoding);
  if (t.workers) config.workers = *t.workers;
  if (t.steps) config.hp.max_global_steps = *t.steps;
  if (t.output) config.output_dir = *t.output;
  if (t.time_limit) config.time_limit_seconds = *t.time_limit;
  if (t.cpu_limit) config.cpu_limit_seconds = *t.cpu_limit;
  if (t.checkpoint_interval) config.checkpoint_interval = *t.checkpoint_interval;
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') {
    config.output_dir = env;
  }
  config.validate();

  fs::create_directories(config.output_dir);
  save_config(fs::path(config.output_dir) / "config.ini", config);
  const TrainSummary summary = train(config.train_config());
  out << "global_steps: " << summary.global_steps << '\n';
  out << "episodes: " << summary.episodes << '\n';
  out << "cpu_seconds: " << summary.cpu_seconds << '\n';
  out << "updates: " << summary.updates << '\n';
  out << "skipped_updates: " << summary.skipped_updates << '\n';
  out << "checkpoints: " << summary.checkpoints.size() << '\n';
  out << "final_checkpoint: " << summary.final_checkpoint.string() << '\n';
  out << "metrics_log: " << summary.metrics_log.string() << '\n';
  return kExitOk;
}

struct EvalCliOptions {
  std::string checkpoint;
  std::string policy;
  std::optional<int> episodes;
  bool argmax = false;
  bool csv = false;
  std::string records;
  std::string label;
};

int cmd_eval(const CommonOptions& opts, const EvalCliOptions& e, std::ostream& out) {
  RunConfig config = resolve(opts);
  if (e.episodes) config.eval_episodes = *e.episodes;
  if (e.argmax) config.eval_argmax = true;
  config.generation.validate();
  if (config.eval_episodes < 1) throw ConfigError("--episodes must be positive");
  if (e.checkpoint.empty() == e.policy.empty()) {
    throw ConfigError("eval needs exactly one of --checkpoint or --policy random");
  }
  if (!e.policy.empty() && e.policy != "random") {
    throw ConfigError("the only built-in policy is 'random'");
  }

  EvalOptions options;
  options.episodes = config.eval_episodes;
  options.seed = config.seed;
  options.generation = config.generation;
  options.rewards = config.rewards;
  options.argmax = config.eval_argmax;

  EvalReport report;
  std::string label = e.label;
  if (!e.checkpoint.empty()) {
    const Checkpoint ckpt = load_checkpoint(e.checkpoint);
    if (label.empty()) {
      label = std::string(ckpt.situations.label()) + "-" + std::string(to_string(ckpt.encoding));
    }
    report = evaluate_agent(PartitionedAgent::from_checkpoint(ckpt), options, label);
  } else {
    if (label.empty()) label = "random";
    report = evaluate_random(options);
  }

  if (e.csv) {
    out << csv_header() << '\n' << csv_row(report, label) << '\n';
  } else {
    out << format_summary(report);
  }
  if (!e.records.empty()) {
    std::ofstream rec(e.records, std::ios::trunc);
    if (!rec) throw std::runtime_error("cannot write " + e.records);
    for (const EpisodeRecord& r : report.records) rec << to_json_line(r) << '\n';
    save_config(fs::path(e.records).replace_extension(".config.ini"), config);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partitioned A3C agent for Rogue-like dungeon exploration", "pa3c"};
  app.require_subcommand(1);

  CommonOptions gen_opts, play_opts, train_opts, eval_opts;
  PlayOptions play;
  TrainOptions train_cli;
  EvalCliOptions eval_cli;

  CLI::App* gen = app.add_subcommand("gen", "Print a fully revealed level as a 24x80 frame");
  add_common(gen, gen_opts);

  CLI::App* play_cmd = app.add_subcommand("play", "Roll out one episode and dump its frames");
  add_common(play_cmd, play_opts);
  play_cmd->add_option("--policy", play.policy, "random");
  play_cmd->add_option("--checkpoint", play.checkpoint, "Play a trained checkpoint")
      ->check(CLI::ExistingFile);
  play_cmd->add_option("--actions", play.actions, "Scripted keys, e.g. 'hjkl>'");
  play_cmd->add_option("--trace", play.trace, "Write the episode trace as JSON lines");
  play_cmd->add_flag("--full-map", play.full_map, "Render the whole level, not the frames memory");
  play_cmd->add_flag("--last-only", play.last_only, "Only print the final frame");

  CLI::App* train_cmd = app.add_subcommand("train", "Train a partitioned A3C agent");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--situations", train_cli.situations, "s1, s2 or s4");
  train_cmd->add_option("--encoding", train_cli.encoding, "c1 or c2");
  train_cmd->add_option("--workers", train_cli.workers, "Asynchronous workers");
  train_cmd->add_option("--steps", train_cli.steps, "Total global steps (T_max)");
  train_cmd->add_option("--output", train_cli.output, "Output directory");
  train_cmd->add_option("--time-limit", train_cli.time_limit, "Wall-clock limit in seconds");
  train_cmd->add_option("--cpu-limit", train_cli.cpu_limit, "CPU-time limit in seconds, all threads");
  train_cmd->add_option("--checkpoint-interval", train_cli.checkpoint_interval,
                        "Global steps between checkpoints");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a policy over independent episodes");
  add_common(eval_cmd, eval_opts);
  eval_cmd->add_option("--checkpoint", eval_cli.checkpoint, "Checkpoint to evaluate")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--policy", eval_cli.policy, "'random' for the uniform baseline");
  eval_cmd->add_option("--episodes", eval_cli.episodes, "Number of episodes (default 200)");
  eval_cmd->add_flag("--argmax", eval_cli.argmax, "Greedy actions instead of sampling");
  eval_cmd->add_flag("--csv", eval_cli.csv, "Print a results-table row");
  eval_cmd->add_option("--records", eval_cli.records, "Per-episode JSON lines output");
  eval_cmd->add_option("--label", eval_cli.label, "Agent label for the report");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pa3c: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_opts, out);
    if (*play_cmd) return cmd_play(play_opts, play, out);
    if (*train_cmd) return cmd_train(train_opts, train_cli, out);
    if (*eval_cmd) return cmd_eval(eval_opts, eval_cli, out);
  } catch (const ConfigError& e) {
    err << "pa3c: configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "pa3c: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "pa3c: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace pa3c::cli
