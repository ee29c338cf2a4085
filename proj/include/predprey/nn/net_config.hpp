#pragma once

namespace predprey::nn {

struct NetConfig {
  int hidden_width = 512;
  int obs_dim = 12;
  int action_count = 4;
  int embed_dim = 32;
  int locator_out = 144;

  // Throws std::invalid_argument on non-positive sizes or a head size other
  // than 4 actions / 144 location classes.
  void validate() const;

  int gru_input_dim() const { return obs_dim + embed_dim; }
  // Embedding row used before the first action of an episode.
  int no_action_index() const { return action_count; }

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

}  // namespace predprey::nn
