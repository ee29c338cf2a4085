#include "predprey/experiments/cross_eval.hpp"

#include <stdexcept>

#include "predprey/ppo/trainer.hpp"

namespace predprey::experiments {

namespace {

ppo::AgentDesign opponent_of(const nn::Checkpoint& ckpt, const char* what) {
  if (!ckpt.metadata.contains("opponent"))
    throw std::invalid_argument(std::string(what) + " checkpoint does not record its training opponent");
  return ppo::design_from_metadata(ckpt.metadata.at("opponent"));
}

}  // namespace

DesignPoint design_from_checkpoint(const nn::Checkpoint& ckpt) {
  const ppo::AgentDesign d = ppo::design_from_metadata(ckpt.metadata);
  try {
    return DesignPoint::on_grid(d.spec.speed, d.spec.vision, d.gamma);
  } catch (const std::invalid_argument&) {
  }
  int vision_level = -1;
  int planning_level = -1;
  try {
    vision_level = vision_level_of(d.spec.vision);
  } catch (const std::invalid_argument&) {
  }
  try {
    planning_level = planning_level_of(d.gamma);
  } catch (const std::invalid_argument&) {
  }
  return DesignPoint::custom(d.spec.speed, d.spec.vision, d.gamma, vision_level, planning_level);
}

void check_cross_eval_entry(const CrossEvalEntry& entry) {
  if (entry.predator.metadata.value("role", std::string()) != "predator")
    throw std::invalid_argument("cross-eval: first checkpoint is not a predator");
  if (!ppo::design_from_metadata(entry.predator.metadata).spec.vision.is_unbounded())
    throw std::invalid_argument("cross-eval: predator was not trained with unbounded vision");
  for (const auto* prey : {&entry.prey_long, &entry.prey_short}) {
    if (prey->metadata.value("role", std::string()) != "prey")
      throw std::invalid_argument("cross-eval: prey checkpoint does not carry the prey role");
  }
  if (!opponent_of(entry.prey_long, "long-prey").spec.vision.is_unbounded())
    throw std::invalid_argument("cross-eval: long prey was not trained against an unbounded-vision predator");
  if (opponent_of(entry.prey_short, "short-prey").spec.vision.is_unbounded())
    throw std::invalid_argument("cross-eval: short prey was trained against an unbounded-vision predator");
}

std::vector<CrossEvalRow> cross_evaluate(const std::vector<CrossEvalEntry>& entries, arena::VisionArea eval_vision,
                                         const EvaluationOptions& options) {
  std::vector<CrossEvalRow> rows;
  for (const CrossEvalEntry& entry : entries) {
    check_cross_eval_entry(entry);
    const DesignPoint design = design_from_checkpoint(entry.predator);
    for (const auto& [variant, prey] : {std::pair{kPreyVsLong, &entry.prey_long}, std::pair{kPreyVsShort, &entry.prey_short}}) {
      const EvaluationResult r = evaluate_with_vision(entry.predator, *prey, design, eval_vision, options);
      CrossEvalRow row;
      row.design = design;
      row.prey_variant = variant;
      row.eval_vision = eval_vision;
      row.captures = r.captures;
      row.steps = r.steps;
      row.seed = options.seed;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace predprey::experiments
