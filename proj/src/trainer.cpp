#include "pa3c/trainer.hpp"

#include <chrono>
#include <ctime>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <thread>

#include <json.hpp>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "pa3c/errors.hpp"
#include "pa3c/observation.hpp"

namespace pa3c {

void TrainConfig::validate() const {
  generation.validate();
  hp.validate();
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (checkpoint_interval < 0) throw ConfigError("checkpoint_interval must be non-negative");
  if (time_limit_seconds < 0.0) throw ConfigError("time_limit_seconds must be non-negative");
  if (cpu_limit_seconds < 0.0) throw ConfigError("cpu_limit_seconds must be non-negative");
  if (network.input_channels != channels(encoding)) {
    throw ConfigError("network input channels do not match the encoding");
  }
}

SharedStore::SharedStore(const SituationConfig& situations, const NetworkSpec& spec,
                         std::uint64_t seed)
    : situations_(situations), spec_(spec) {
  for (SituationId id : situations.active_set()) {
    Network<float> net(spec);
    net.initialize(mix_seed(seed, 0x1000 + static_cast<std::uint64_t>(id)));
    auto s = std::make_unique<Slot>();
    s->id = id;
    s->params = net.params();
    s->mean_square = Eigen::VectorXf::Zero(net.params().size());
    slots_.push_back(std::move(s));
  }
}

SharedStore::SharedStore(const Checkpoint& ckpt) : situations_(ckpt.situations), spec_(ckpt.spec) {
  for (SituationId id : situations_.active_set()) {
    const Checkpoint::Slot& src = ckpt.slot(id);
    auto s = std::make_unique<Slot>();
    s->id = id;
    s->params = src.params;
    s->mean_square = src.mean_square;
    slots_.push_back(std::move(s));
  }
  global_step_ = ckpt.global_step;
}

SharedStore::Slot& SharedStore::slot(SituationId id) {
  for (auto& s : slots_) {
    if (s->id == id) return *s;
  }
  throw ContractViolation("no shared parameters for situation " + std::to_string(id));
}

const SharedStore::Slot& SharedStore::slot(SituationId id) const {
  return const_cast<SharedStore*>(this)->slot(id);
}

void SharedStore::read(SituationId id, Eigen::VectorXf& out) const {
  const Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  out = s.params;
}

RmsPropResult SharedStore::apply(SituationId id, const Eigen::VectorXf& grads, double lr,
                                 const Hyperparams& hp) {
  Slot& s = slot(id);
  std::lock_guard lock(s.mutex);
  return rmsprop_update<float>(s.params, s.mean_square, grads, lr, hp);
}

Checkpoint SharedStore::snapshot(Encoding encoding) const {
  Checkpoint ckpt;
  ckpt.situations = situations_;
  ckpt.encoding = encoding;
  ckpt.spec = spec_;
  ckpt.global_step = global_step_.load();
  for (const auto& s : slots_) {
    std::lock_guard lock(s->mutex);
    ckpt.slots.push_back({s->id, s->params, s->mean_square});
  }
  return ckpt;
}

std::string to_json_line(const EpisodeMetrics& m) {
  nlohmann::json j;
  j["T"] = m.global_step;
  j["episode"] = m.episode;
  j["situation_config"] = m.situation_config;
  j["return"] = m.total_return;
  j["steps"] = m.steps;
  j["success"] = m.success;
  return j.dump();
}

EpisodeState EpisodeState::start(std::uint64_t seed, const GenerationConfig& generation) {
  EpisodeState s{new_episode(seed, generation), {}, 0.0, false};
  s.ledger = EpisodeLedger::from_start(s.episode.known);
  return s;
}

CollectedSegment collect_segment(PartitionedAgent& agent, EpisodeState& env, SituationId situation,
                                 int t_max, const ActionChooser& choose,
                                 const RewardConfig& rewards) {
  if (env.done()) throw ProtocolError("collect_segment on a finished episode");
  CollectedSegment out;
  out.segment.situation = situation;
  out.segment.initial_state = agent.state(situation);
  out.next_situation = situation;

  while (true) {
    Transition tr;
    tr.obs = crop_view(env.episode.known, agent.encoding());
    tr.situation = situation;
    tr.prev_action = agent.prev_action();
    tr.prev_reward = agent.prev_reward();
    const ForwardResult<float> fwd = agent.evaluate(situation, tr.obs);
    agent.state(situation) = fwd.state;
    tr.action = choose(fwd);

    const KnownMap pre = env.episode.known;
    const StepOutcome outcome =
        step(env.episode.level, env.episode.known, static_cast<Action>(tr.action));
    tr.reward = compute_reward(pre, outcome, env.episode.known, env.ledger, rewards).total();
    tr.terminal = outcome.terminal;
    env.total_return += tr.reward;
    agent.record(tr.action, tr.reward);
    if (outcome.kind == OutcomeKind::Descended) env.succeeded = true;
    out.segment.steps.push_back(std::move(tr));

    if (outcome.terminal) {
      out.terminal = true;
      out.bootstrap = 0.0;
      return out;
    }
    const SituationId next = agent.classify(env.episode.known);
    if (next != situation || static_cast<int>(out.segment.steps.size()) >= t_max) {
      out.next_situation = next;
      const Observation next_obs = crop_view(env.episode.known, agent.encoding());
      out.bootstrap = agent.evaluate(next, next_obs).value;
      return out;
    }
  }
}

namespace {

class Run {
 public:
  explicit Run(const TrainConfig& config)
      : config_(config),
        store_(config.situations, config.network, config.seed),
        start_(std::chrono::steady_clock::now()),
        cpu_start_(std::clock()) {
    std::filesystem::create_directories(config.output_dir);
    metrics_path_ = config.output_dir / "metrics.jsonl";
    metrics_.open(metrics_path_, std::ios::trunc);
    if (!metrics_) throw CheckpointError("cannot open metrics log " + metrics_path_.string());
  }

  TrainSummary run() {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(config_.workers);
    for (int w = 0; w < config_.workers; ++w) {
      threads.emplace_back([this, w, &errors] {
        try {
          worker(w);
        } catch (...) {
          errors[w] = std::current_exception();
          stop_ = true;
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    summary_.global_steps = store_.global_step_value();
    summary_.cpu_seconds = cpu_seconds();
    summary_.final_checkpoint = config_.output_dir / "final.pa3c";
    save_checkpoint(summary_.final_checkpoint, store_.snapshot(config_.encoding));
    summary_.metrics_log = metrics_path_;
    metrics_.flush();
    return summary_;
  }

 private:
  bool should_stop() const {
    if (stop_) return true;
    if (store_.global_step_value() >= config_.hp.max_global_steps) return true;
    if (config_.time_limit_seconds > 0.0) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
      if (elapsed.count() >= config_.time_limit_seconds) return true;
    }
    if (config_.cpu_limit_seconds > 0.0 && cpu_seconds() >= config_.cpu_limit_seconds) return true;
    return false;
  }

  double cpu_seconds() const {
    return static_cast<double>(std::clock() - cpu_start_) / CLOCKS_PER_SEC;
  }

  void worker(int index) {
    const Hyperparams& hp = config_.hp;
    const LossWeights weights{hp.entropy_beta, hp.value_weight};
    PartitionedAgent agent(config_.situations, config_.encoding, config_.network);
    std::mt19937_64 policy_rng(mix_seed(config_.seed, 0xA000 + static_cast<std::uint64_t>(index)));
    const ActionChooser sample = [&policy_rng](const ForwardResult<float>& f) {
      return sample_action(std::span<const float>(f.policy), policy_rng);
    };

    for (std::uint64_t local_episode = 0; !should_stop(); ++local_episode) {
      const std::uint64_t seed =
          mix_seed(mix_seed(config_.seed, static_cast<std::uint64_t>(index)), local_episode);
      EpisodeState env = EpisodeState::start(seed, config_.generation);
      agent.begin_episode();
      SituationId situation = agent.classify(env.episode.known);

      while (!env.done()) {
        store_.read(situation, agent.network(situation).params());
        CollectedSegment seg =
            collect_segment(agent, env, situation, hp.t_max, sample, config_.rewards);
        const std::int64_t steps = static_cast<std::int64_t>(seg.segment.steps.size());
        const std::int64_t t_now = store_.global_step().fetch_add(steps) + steps;

        std::vector<double> rewards;
        rewards.reserve(seg.segment.steps.size());
        for (const Transition& tr : seg.segment.steps) rewards.push_back(tr.reward);
        const std::vector<double> returns =
            n_step_returns(rewards, seg.bootstrap, seg.terminal, hp.gamma);
        const LossResult<float> loss =
            agent.network(situation).loss_and_grads(seg.segment, returns, weights);
        const double lr = anneal_lr(hp.initial_lr, t_now, hp.max_global_steps);
        const RmsPropResult applied = store_.apply(situation, loss.grads, lr, hp);
        if (applied.applied) {
          ++updates_;
        } else {
          ++skipped_;
          std::lock_guard lock(log_mutex_);
          std::cerr << "[pa3c] worker " << index << ": non-finite gradient at T=" << t_now
                    << ", update skipped\n";
        }
        maybe_checkpoint(t_now);
        situation = seg.next_situation;
        if (!env.done() && should_stop()) break;
      }

      if (env.done()) {
        EpisodeMetrics m;
        m.global_step = store_.global_step_value();
        m.situation_config = std::string(config_.situations.label());
        m.total_return = env.total_return;
        m.steps = env.episode.level.step_count;
        m.success = env.succeeded;
        std::lock_guard lock(log_mutex_);
        m.episode = summary_.episodes++;
        metrics_ << to_json_line(m) << '\n';
      }
    }
  }

  void maybe_checkpoint(std::int64_t t_now) {
    if (config_.checkpoint_interval <= 0) return;
    const std::int64_t index = t_now / config_.checkpoint_interval;
    std::int64_t done = checkpoints_written_.load();
    while (index > done) {
      if (checkpoints_written_.compare_exchange_weak(done, index)) {
        char name[64];
        std::snprintf(name, sizeof(name), "ckpt-%012lld.pa3c",
                      static_cast<long long>(index * config_.checkpoint_interval));
        const auto path = config_.output_dir / name;
        save_checkpoint(path, store_.snapshot(config_.encoding));
        std::lock_guard lock(log_mutex_);
        summary_.checkpoints.push_back(path);
        return;
      }
    }
  }

  const TrainConfig& config_;
  SharedStore store_;
  std::chrono::steady_clock::time_point start_;
  std::clock_t cpu_start_;
  std::filesystem::path metrics_path_;
  std::ofstream metrics_;
  std::mutex log_mutex_;
  std::atomic<bool> stop_{false};
  std::atomic<std::int64_t> checkpoints_written_{0};
  std::atomic<std::int64_t> updates_{0};
  std::atomic<std::int64_t> skipped_{0};
  TrainSummary summary_;

 public:
  std::int64_t updates() const { return updates_.load(); }
  std::int64_t skipped() const { return skipped_.load(); }
};

}  // namespace

TrainSummary train(const TrainConfig& config) {
  config.validate();
#if defined(__GLIBC__)
  // Segment-sized temporaries are several MB; keep them on the heap instead
  // of paying an mmap/munmap round trip (and page faults) per update.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  Run run(config);
  TrainSummary summary = run.run();
  summary.updates = run.updates();
  summary.skipped_updates = run.skipped();
  return summary;
}

}  // namespace pa3c
