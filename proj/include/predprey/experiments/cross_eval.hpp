#pragma once

#include <string>
#include <vector>

#include "predprey/experiments/evaluate.hpp"
#include "predprey/experiments/results.hpp"
#include "predprey/nn/checkpoint.hpp"

namespace predprey::experiments {

inline constexpr const char* kPreyVsLong = "prey_trained_vs_long";
inline constexpr const char* kPreyVsShort = "prey_trained_vs_short";

// A predator trained with unbounded vision plus the two prey it is tested
// against: one co-trained with a long-vision predator and one co-trained with
// a short-vision predator.
struct CrossEvalEntry {
  nn::Checkpoint predator;
  nn::Checkpoint prey_long;
  nn::Checkpoint prey_short;
};

// The predator design recorded in a checkpoint. Levels come from the grid when
// the values lie on it, otherwise they are -1.
DesignPoint design_from_checkpoint(const nn::Checkpoint& ckpt);

// Validates checkpoint roles and training vision; throws std::invalid_argument.
void check_cross_eval_entry(const CrossEvalEntry& entry);

// Evaluates every predator at `eval_vision` against both prey variants. Each
// pairing uses the same evaluation seed. Returns two rows per entry.
std::vector<CrossEvalRow> cross_evaluate(const std::vector<CrossEvalEntry>& entries, arena::VisionArea eval_vision,
                                         const EvaluationOptions& options);

}  // namespace predprey::experiments
