#pragma once

#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "predprey/nn/params.hpp"

namespace predprey::nn {

// File layout:
//   line 1  "PREDPREY-CKPT 1"
//   line 2  JSON manifest: format tag, version, net config, tensor names and
//           row-major shapes, payload byte count, caller metadata
//   rest    float32 little-endian values in manifest order
inline constexpr const char* kCheckpointTag = "PREDPREY-CKPT";
inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  ParamSet<float> params;
  nlohmann::json metadata;
};

nlohmann::json to_json(const NetConfig& config);
NetConfig net_config_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const ParamSet<float>& params,
                     const nlohmann::json& metadata = nlohmann::json::object());

// Validates the manifest's tensor list against the layout its NetConfig
// implies, and against `expected` when given.
Checkpoint load_checkpoint(const std::filesystem::path& path, const NetConfig* expected = nullptr);

}  // namespace predprey::nn
