#include "predprey/ppo/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "predprey/nn/categorical.hpp"
#include "predprey/nn/checkpoint.hpp"
#include "predprey/ppo/returns.hpp"

namespace predprey::ppo {

using arena::AgentKind;

void PPOConfig::validate() const {
  if (!(clip_eps > 0.0)) throw std::invalid_argument("clip_eps must be positive");
  if (value_coef < 0.0 || entropy_coef < 0.0 || location_coef < 0.0)
    throw std::invalid_argument("loss coefficients must be non-negative");
  if (rollout_len < 1 || n_envs < 1 || total_updates < 0)
    throw std::invalid_argument("rollout_len and n_envs must be at least 1, total_updates non-negative");
  if (epochs != 1 || minibatches != 1) throw std::invalid_argument("only one epoch with one minibatch is supported");
  if (use_gae) throw std::invalid_argument("GAE is not supported; returns are plain discounted sums");
  if (clip_value_loss) throw std::invalid_argument("value-loss clipping is not supported");
  if (!(learning_rate >= 0.0) || !(max_grad_norm > 0.0))
    throw std::invalid_argument("learning_rate must be >= 0 and max_grad_norm > 0");
  if (log_interval < 1) throw std::invalid_argument("log_interval must be at least 1");
}

double linear_lr(long update, long total, double initial) {
  if (total <= 0) return 0.0;
  const double frac = 1.0 - static_cast<double>(update) / static_cast<double>(total);
  return initial * std::max(0.0, frac);
}

void TrainerSetup::validate() const {
  arena.validate();
  net.validate();
  ppo.validate();
  if (net.obs_dim != arena.observation_dim())
    throw std::invalid_argument("net.obs_dim must equal the arena observation size (6 + 2 * n_obstacles)");
  for (const AgentDesign* d : {&predator, &prey}) {
    if (!(d->gamma > 0.0 && d->gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
    if (!(d->spec.speed > 0.0)) throw std::invalid_argument("agent speed must be positive");
  }
}

arena::Rng derive_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return arena::Rng(seq);
}

namespace {

constexpr std::uint64_t kPredatorInitStream = 1;
constexpr std::uint64_t kPreyInitStream = 2;
constexpr std::uint64_t kPredatorPolicyStream = 3;
constexpr std::uint64_t kPreyPolicyStream = 4;
constexpr std::uint64_t kEnvStreamBase = 1000;

}  // namespace

Trainer::Trainer(const TrainerSetup& setup) : setup_(setup) {
  setup_.validate();
  const int n = setup_.ppo.n_envs;
  const auto layout = nn::ParamLayout::build(setup_.net);

  auto init_slot = [&](AgentSlot& s, std::uint64_t init_stream, std::uint64_t policy_stream, double gamma) {
    s.params = nn::ParamSet<float>(layout);
    arena::Rng init_rng = derive_stream(setup_.seed, init_stream);
    nn::initialize(s.params, init_rng);
    s.adam = nn::AdamState::zeros(layout->total_size);
    s.hidden = nn::Mat<float>::Zero(setup_.net.hidden_width, n);
    s.prev_actions.assign(static_cast<std::size_t>(n), setup_.net.no_action_index());
    s.policy_rng = derive_stream(setup_.seed, policy_stream);
    s.gamma = gamma;
  };
  init_slot(predator_, kPredatorInitStream, kPredatorPolicyStream, setup_.predator.gamma);
  init_slot(prey_, kPreyInitStream, kPreyPolicyStream, setup_.prey.gamma);

  envs_.resize(static_cast<std::size_t>(n));
  predator_obs_.resize(envs_.size());
  prey_obs_.resize(envs_.size());
  episode_start_.assign(envs_.size(), 1);
  predator_return_.assign(envs_.size(), 0.0);
  prey_return_.assign(envs_.size(), 0.0);
  for (int i = 0; i < n; ++i) env_rngs_.push_back(derive_stream(setup_.seed, kEnvStreamBase + static_cast<std::uint64_t>(i)));
  for (std::size_t i = 0; i < envs_.size(); ++i) reset_env(i);
}

void Trainer::reset_env(std::size_t n) {
  envs_[n] = arena::reset(env_rngs_[n], setup_.arena, setup_.predator.spec, setup_.prey.spec);
  predator_obs_[n] = arena::make_observation(envs_[n].predator, envs_[n].prey, envs_[n]);
  prey_obs_[n] = arena::make_observation(envs_[n].prey, envs_[n].predator, envs_[n]);
  episode_start_[n] = 1;
  predator_return_[n] = 0.0;
  prey_return_[n] = 0.0;
  for (AgentSlot* s : {&predator_, &prey_}) {
    s->hidden.col(static_cast<Eigen::Index>(n)).setZero();
    s->prev_actions[n] = setup_.net.no_action_index();
  }
}

RolloutPair Trainer::collect_rollout() {
  const int steps = setup_.ppo.rollout_len;
  const int n_envs = setup_.ppo.n_envs;
  const int obs_dim = setup_.net.obs_dim;
  const int width = setup_.net.hidden_width;
  RolloutPair rollout{RolloutBuffer::make(steps, n_envs, obs_dim, width),
                      RolloutBuffer::make(steps, n_envs, obs_dim, width)};

  struct Side {
    AgentSlot* agent;
    RolloutBuffer* buffer;
    std::vector<arena::Observation>* obs;
    bool predator;
  };
  const std::array<Side, 2> sides = {Side{&predator_, &rollout.predator, &predator_obs_, true},
                                     Side{&prey_, &rollout.prey, &prey_obs_, false}};

  for (const Side& s : sides) s.buffer->initial_hidden = s.agent->hidden;

  std::vector<arena::Action> pred_actions(static_cast<std::size_t>(n_envs));
  std::vector<arena::Action> prey_actions(static_cast<std::size_t>(n_envs));
  nn::Mat<float> obs_block(obs_dim, n_envs);

  for (int t = 0; t < steps; ++t) {
    for (const Side& s : sides) {
      RolloutBuffer& b = *s.buffer;
      for (int n = 0; n < n_envs; ++n) {
        const auto un = static_cast<std::size_t>(n);
        const std::size_t idx = b.index(t, n);
        (*s.obs)[un].write_to(std::span<float>(b.observations.col(static_cast<Eigen::Index>(idx)).data(),
                                               static_cast<std::size_t>(obs_dim)));
        b.prev_actions[idx] = s.agent->prev_actions[un];
        b.masks(t, n) = episode_start_[un] ? 0.0f : 1.0f;
        const arena::EnvState& env = envs_[un];
        b.location_labels[idx] = s.predator ? arena::relative_position_label(env.predator, env.prey, env.config)
                                            : arena::relative_position_label(env.prey, env.predator, env.config);
      }
      obs_block = b.observations.middleCols(static_cast<Eigen::Index>(t) * n_envs, n_envs);
      const std::span<const int> prev(b.prev_actions.data() + b.index(t, 0), static_cast<std::size_t>(n_envs));
      nn::PolicyOutput<float> out = nn::forward(s.agent->params, obs_block, prev, s.agent->hidden);
      if (!out.action_logits.allFinite() || !out.values.allFinite())
        throw TrainingDiverged("non-finite policy output during rollout collection");

      for (int n = 0; n < n_envs; ++n) {
        const nn::Categorical<float> dist(out.action_logits.col(n));
        const int a = dist.sample(s.agent->policy_rng);
        const std::size_t idx = b.index(t, n);
        b.actions[idx] = a;
        b.log_probs(t, n) = dist.log_prob(a);
        b.values(t, n) = out.values(0, n);
        (s.predator ? pred_actions : prey_actions)[static_cast<std::size_t>(n)] = arena::action_from_index(a);
      }
      s.agent->hidden = std::move(out.hidden);
    }

    for (int n = 0; n < n_envs; ++n) {
      const auto un = static_cast<std::size_t>(n);
      arena::StepResult res = arena::step(envs_[un], pred_actions[un], prey_actions[un]);
      rollout.predator.rewards(t, n) = static_cast<float>(res.outcome.predator_reward);
      rollout.prey.rewards(t, n) = static_cast<float>(res.outcome.prey_reward);
      predator_return_[un] += res.outcome.predator_reward;
      prey_return_[un] += res.outcome.prey_reward;
      if (res.outcome.done()) {
        tally_.episodes += 1;
        tally_.captures += res.outcome.captured ? 1 : 0;
        tally_.truncations += res.outcome.truncated ? 1 : 0;
        tally_.predator_return_sum += predator_return_[un];
        tally_.prey_return_sum += prey_return_[un];
        reset_env(un);
      } else {
        predator_obs_[un] = std::move(res.predator_obs);
        prey_obs_[un] = std::move(res.prey_obs);
        episode_start_[un] = 0;
        predator_.prev_actions[un] = to_index(pred_actions[un]);
        prey_.prev_actions[un] = to_index(prey_actions[un]);
      }
    }
  }

  // Bootstrap values for the state after the window.
  for (const Side& s : sides) {
    RolloutBuffer& b = *s.buffer;
    for (int n = 0; n < n_envs; ++n) {
      const auto un = static_cast<std::size_t>(n);
      b.masks(steps, n) = episode_start_[un] ? 0.0f : 1.0f;
      (*s.obs)[un].write_to(std::span<float>(obs_block.col(n).data(), static_cast<std::size_t>(obs_dim)));
    }
    const nn::PolicyOutput<float> out = nn::forward(s.agent->params, obs_block, s.agent->prev_actions, s.agent->hidden);
    if (!out.values.allFinite()) throw TrainingDiverged("non-finite bootstrap value");
    b.values.row(steps) = out.values.row(0);
  }
  return rollout;
}

PpoBatch<float> Trainer::make_batch(const AgentSlot& agent, const RolloutBuffer& buffer) const {
  const nn::RowMat<float> returns = compute_returns(buffer.rewards, buffer.masks, buffer.values, agent.gamma);
  const nn::RowMat<float> adv = compute_advantages(returns, buffer.values, setup_.ppo.normalize_advantages);
  PpoBatch<float> batch;
  batch.sequence = buffer.sequence_input<float>();
  batch.actions = buffer.actions;
  batch.location_labels = buffer.location_labels;
  const Eigen::Index m = buffer.samples();
  batch.old_log_probs = Eigen::Map<const nn::Vec<float>>(buffer.log_probs.data(), m);
  batch.advantages = Eigen::Map<const nn::Vec<float>>(adv.data(), m);
  batch.returns = Eigen::Map<const nn::Vec<float>>(returns.data(), m);
  return batch;
}

nn::ParamSet<float> Trainer::agent_gradient(AgentKind kind, const RolloutBuffer& buffer,
                                            AgentUpdateStats* stats) const {
  const AgentSlot& agent = slot(kind);
  nn::ParamSet<float> grads(agent.params.layout_ptr());
  const LossBreakdown<float> losses = ppo_gradient(agent.params, make_batch(agent, buffer), setup_.ppo, grads);
  const float norm = nn::clip_grad_norm(grads, static_cast<float>(setup_.ppo.max_grad_norm));
  if (stats != nullptr) {
    stats->losses = losses;
    stats->grad_norm = norm;
  }
  return grads;
}

UpdateStats Trainer::update(const RolloutPair& rollout) {
  if (updates_ >= setup_.ppo.total_updates) throw std::logic_error("update counter already reached total_updates");
  UpdateStats stats;
  stats.update = updates_;
  stats.lr = linear_lr(updates_, setup_.ppo.total_updates, setup_.ppo.learning_rate);

  // Both gradients come from the pre-update parameters.
  nn::ParamSet<float> pred_grads = agent_gradient(AgentKind::Predator, rollout.predator, &stats.predator);
  nn::ParamSet<float> prey_grads = agent_gradient(AgentKind::Prey, rollout.prey, &stats.prey);
  nn::adam_step(predator_.params, pred_grads, predator_.adam, stats.lr);
  nn::adam_step(prey_.params, prey_grads, prey_.adam, stats.lr);
  if (!predator_.params.all_finite() || !prey_.params.all_finite())
    throw TrainingDiverged("parameters became non-finite after update " + std::to_string(updates_));
  updates_ += 1;
  return stats;
}

EpisodeTally Trainer::take_tally() {
  EpisodeTally t = tally_;
  tally_ = {};
  return t;
}

namespace {

void accumulate(LossBreakdown<float>& acc, const LossBreakdown<float>& l) {
  acc.action += l.action;
  acc.value += l.value;
  acc.entropy += l.entropy;
  acc.location += l.location;
  acc.total += l.total;
  acc.clip_fraction += l.clip_fraction;
}

void scale(LossBreakdown<float>& acc, float s) {
  acc.action *= s;
  acc.value *= s;
  acc.entropy *= s;
  acc.location *= s;
  acc.total *= s;
  acc.clip_fraction *= s;
}

}  // namespace

void Trainer::run(const std::function<void(const LogRow&)>& on_log) {
  const int interval = setup_.ppo.log_interval;
  LossBreakdown<float> pred_acc, prey_acc;
  int in_window = 0;
  double window_lr = 0.0;
  take_tally();
  while (updates_ < setup_.ppo.total_updates) {
    const RolloutPair rollout = collect_rollout();
    const UpdateStats stats = update(rollout);
    accumulate(pred_acc, stats.predator.losses);
    accumulate(prey_acc, stats.prey.losses);
    window_lr = stats.lr;
    ++in_window;
    if (updates_ % interval == 0) {
      const EpisodeTally tally = take_tally();
      LogRow row;
      row.update = updates_;
      row.env_steps = updates_ * setup_.ppo.rollout_len;
      row.lr = window_lr;
      if (tally.episodes > 0) {
        const auto eps = static_cast<double>(tally.episodes);
        row.captures_per_episode = static_cast<double>(tally.captures) / eps;
        row.mean_predator_return = tally.predator_return_sum / eps;
        row.mean_prey_return = tally.prey_return_sum / eps;
      }
      scale(pred_acc, 1.0f / static_cast<float>(in_window));
      scale(prey_acc, 1.0f / static_cast<float>(in_window));
      row.predator = pred_acc;
      row.prey = prey_acc;
      if (on_log) on_log(row);
      pred_acc = {};
      prey_acc = {};
      in_window = 0;
    }
  }
}

void write_log_header(std::ostream& out) {
  out << "update,env_steps,lr,captures_per_episode,mean_predator_return,mean_prey_return,"
         "predator_action_loss,predator_value_loss,predator_entropy,predator_location_loss,"
         "prey_action_loss,prey_value_loss,prey_entropy,prey_location_loss\n";
}

void write_log_row(std::ostream& out, const LogRow& r) {
  out << r.update << ',' << r.env_steps << ',' << std::setprecision(9) << r.lr << ',' << r.captures_per_episode << ','
      << r.mean_predator_return << ',' << r.mean_prey_return << ',' << r.predator.action << ',' << r.predator.value
      << ',' << r.predator.entropy << ',' << r.predator.location << ',' << r.prey.action << ',' << r.prey.value << ','
      << r.prey.entropy << ',' << r.prey.location << '\n';
}

nlohmann::json describe_agent(AgentKind kind, const AgentDesign& design) {
  nlohmann::json vision = nullptr;
  if (!design.spec.vision.is_unbounded()) vision = design.spec.vision.area();
  return {{"role", std::string(arena::to_string(kind))},
          {"speed", design.spec.speed},
          {"vision_area", vision},
          {"gamma", design.gamma}};
}

AgentDesign design_from_metadata(const nlohmann::json& metadata) {
  AgentDesign d;
  d.spec.speed = metadata.at("speed").get<double>();
  const nlohmann::json& vision = metadata.at("vision_area");
  d.spec.vision = vision.is_null() ? arena::VisionArea::unbounded() : arena::VisionArea::of(vision.get<double>());
  d.gamma = metadata.at("gamma").get<double>();
  return d;
}

TrainPairResult train_pair(const TrainerSetup& setup, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  TrainPairResult result;
  result.predator_checkpoint = out_dir / "predator.ckpt";
  result.prey_checkpoint = out_dir / "prey.ckpt";
  result.log_path = out_dir / "train_log.csv";

  std::ofstream log(result.log_path, std::ios::trunc);
  if (!log) throw std::runtime_error("cannot open training log " + result.log_path.string());
  write_log_header(log);

  Trainer trainer(setup);
  trainer.run([&](const LogRow& row) {
    write_log_row(log, row);
    log.flush();
    result.log.push_back(row);
  });

  auto metadata = [&](AgentKind kind, const AgentDesign& design, AgentKind other, const AgentDesign& opponent) {
    nlohmann::json m = describe_agent(kind, design);
    m["opponent"] = describe_agent(other, opponent);
    m["seed"] = setup.seed;
    m["updates"] = trainer.update_count();
    return m;
  };
  nn::save_checkpoint(result.predator_checkpoint, trainer.params(AgentKind::Predator),
                      metadata(AgentKind::Predator, setup.predator, AgentKind::Prey, setup.prey));
  nn::save_checkpoint(result.prey_checkpoint, trainer.params(AgentKind::Prey),
                      metadata(AgentKind::Prey, setup.prey, AgentKind::Predator, setup.predator));
  return result;
}

}  // namespace predprey::ppo
