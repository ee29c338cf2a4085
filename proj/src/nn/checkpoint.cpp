#include "predprey/nn/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace predprey::nn {

nlohmann::json to_json(const NetConfig& c) {
  return {{"hidden_width", c.hidden_width}, {"obs_dim", c.obs_dim},       {"action_count", c.action_count},
          {"embed_dim", c.embed_dim},       {"locator_out", c.locator_out}};
}

NetConfig net_config_from_json(const nlohmann::json& j) {
  NetConfig c;
  c.hidden_width = j.value("hidden_width", c.hidden_width);
  c.obs_dim = j.value("obs_dim", c.obs_dim);
  c.action_count = j.value("action_count", c.action_count);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.locator_out = j.value("locator_out", c.locator_out);
  return c;
}

namespace {

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw CheckpointError("checkpoint " + path.string() + ": " + what);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamSet<float>& params,
                     const nlohmann::json& metadata) {
  const ParamLayout& layout = params.layout();
  nlohmann::json tensors = nlohmann::json::array();
  for (const TensorSpec& t : layout.tensors) tensors.push_back({{"name", t.name}, {"shape", {t.rows, t.cols}}});

  const auto count = static_cast<std::size_t>(params.flat().size());
  nlohmann::json manifest = {
      {"format", "predprey-checkpoint"},
      {"version", kCheckpointVersion},
      {"net", to_json(layout.config)},
      {"tensors", tensors},
      {"payload_bytes", count * sizeof(float)},
      {"metadata", metadata},
  };

  std::vector<std::uint32_t> payload(count);
  std::memcpy(payload.data(), params.flat().data(), count * sizeof(float));
  for (auto& word : payload) word = to_little_endian(word);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  out << kCheckpointTag << ' ' << kCheckpointVersion << '\n' << manifest.dump() << '\n';
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (!out) fail(path, "write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const NetConfig* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");

  std::string tag_line;
  std::getline(in, tag_line);
  if (tag_line != std::string(kCheckpointTag) + " " + std::to_string(kCheckpointVersion))
    fail(path, "unrecognised header '" + tag_line + "'");

  std::string manifest_line;
  std::getline(in, manifest_line);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_line);
  } catch (const nlohmann::json::exception& e) {
    fail(path, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (manifest.value("format", "") != "predprey-checkpoint" || manifest.value("version", 0) != kCheckpointVersion)
    fail(path, "manifest format/version mismatch");

  const NetConfig config = net_config_from_json(manifest.at("net"));
  if (expected != nullptr && !(config == *expected)) fail(path, "network config does not match the expected one");

  std::shared_ptr<const ParamLayout> layout;
  try {
    layout = ParamLayout::build(config);
  } catch (const std::invalid_argument& e) {
    fail(path, std::string("invalid network config: ") + e.what());
  }

  const nlohmann::json& tensors = manifest.at("tensors");
  if (!tensors.is_array() || tensors.size() != layout->tensors.size()) fail(path, "tensor count mismatch");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const TensorSpec& spec = layout->tensors[i];
    const auto shape = tensors[i].at("shape").get<std::vector<Eigen::Index>>();
    if (tensors[i].at("name").get<std::string>() != spec.name || shape.size() != 2 || shape[0] != spec.rows ||
        shape[1] != spec.cols)
      fail(path, "tensor " + std::to_string(i) + " (" + spec.name + ") has an unexpected name or shape");
  }

  const auto count = static_cast<std::size_t>(layout->total_size);
  if (manifest.value("payload_bytes", std::size_t{0}) != count * sizeof(float)) fail(path, "payload size mismatch");

  std::vector<std::uint32_t> payload(count);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(count * sizeof(float))) fail(path, "truncated payload");
  if (in.peek() != std::char_traits<char>::eof()) fail(path, "trailing bytes after payload");
  for (auto& word : payload) word = to_little_endian(word);

  Checkpoint ckpt{ParamSet<float>(layout), manifest.value("metadata", nlohmann::json::object())};
  std::memcpy(ckpt.params.flat().data(), payload.data(), count * sizeof(float));
  if (!ckpt.params.all_finite()) fail(path, "payload contains non-finite values");
  return ckpt;
}

}  // namespace predprey::nn
