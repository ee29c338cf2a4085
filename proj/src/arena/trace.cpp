#include "predprey/arena/trace.hpp"

#include <ostream>

#include <json.hpp>

namespace predprey::arena {

namespace {

nlohmann::json pose(const AgentState& s) {
  return {{"x", s.position.x}, {"y", s.position.y}, {"heading", s.heading}};
}

}  // namespace

void TraceWriter::begin_episode(int episode, const EnvState& env) {
  nlohmann::json obstacles = nlohmann::json::array();
  for (const Vec2& c : env.obstacles) obstacles.push_back({c.x, c.y});
  nlohmann::json rec = {
      {"type", "episode"},
      {"episode", episode},
      {"arena_radius", env.config.arena_radius},
      {"obstacle_radius", env.config.obstacle_radius},
      {"agent_radius", env.config.agent_radius},
      {"obstacles", obstacles},
      {"predator", pose(env.predator)},
      {"prey", pose(env.prey)},
  };
  out_ << rec.dump() << '\n';
}

void TraceWriter::record_step(int episode, const EnvState& after, Action predator_action,
                              Action prey_action, const StepResult& result) {
  nlohmann::json rec = {
      {"type", "step"},
      {"episode", episode},
      {"step", result.outcome.step_index},
      {"predator", pose(after.predator)},
      {"prey", pose(after.prey)},
      {"predator_action", to_index(predator_action)},
      {"prey_action", to_index(prey_action)},
      {"predator_reward", result.outcome.predator_reward},
      {"prey_reward", result.outcome.prey_reward},
      {"captured", result.outcome.captured},
      {"truncated", result.outcome.truncated},
      {"predator_sees_prey", result.predator_obs.adversary_visible},
      {"prey_sees_predator", result.prey_obs.adversary_visible},
  };
  out_ << rec.dump() << '\n';
}

}  // namespace predprey::arena
