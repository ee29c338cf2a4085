#include "predprey/ppo/buffer.hpp"

namespace predprey::ppo {

RolloutBuffer RolloutBuffer::make(int steps, int envs, int obs_dim, int hidden_width) {
  RolloutBuffer b;
  b.steps = steps;
  b.envs = envs;
  const auto samples = static_cast<std::size_t>(steps) * envs;
  b.observations = nn::Mat<float>::Zero(obs_dim, static_cast<Eigen::Index>(samples));
  b.prev_actions.assign(samples, 0);
  b.actions.assign(samples, 0);
  b.location_labels.assign(samples, 0);
  b.log_probs = nn::RowMat<float>::Zero(steps, envs);
  b.values = nn::RowMat<float>::Zero(steps + 1, envs);
  b.rewards = nn::RowMat<float>::Zero(steps, envs);
  b.masks = nn::RowMat<float>::Ones(steps + 1, envs);
  b.initial_hidden = nn::Mat<float>::Zero(hidden_width, envs);
  return b;
}

template <typename S>
nn::SequenceInput<S> RolloutBuffer::sequence_input() const {
  nn::SequenceInput<S> in;
  in.steps = steps;
  in.batch = envs;
  in.observations = observations.cast<S>();
  in.prev_actions = prev_actions;
  in.masks = masks.topRows(steps).cast<S>();
  in.initial_hidden = initial_hidden.cast<S>();
  return in;
}

template nn::SequenceInput<float> RolloutBuffer::sequence_input<float>() const;
template nn::SequenceInput<double> RolloutBuffer::sequence_input<double>() const;

}  // namespace predprey::ppo
