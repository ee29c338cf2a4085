#pragma once

#include <iosfwd>

#include "predprey/arena/arena.hpp"

namespace predprey::arena {

// One JSON object per line. An "episode" record (arena geometry, obstacle
// centers, initial agent poses) precedes the "step" records of that episode.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}

  void begin_episode(int episode, const EnvState& env);
  void record_step(int episode, const EnvState& after, Action predator_action, Action prey_action,
                   const StepResult& result);

 private:
  std::ostream& out_;
};

}  // namespace predprey::arena
