#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "playcomm/nn/adam.hpp"
#include "playcomm/nn/model.hpp"
#include "playcomm/tensor.hpp"

namespace playcomm::nn {

inline constexpr char kCheckpointMagic[9] = "PLAYCKPT";  // 8 bytes on disk
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::uint32_t epochs_run = 0;
  double final_loss = 0.0;
  std::uint64_t dataset_fingerprint = 0;
  std::string label;

  friend bool operator==(const CheckpointMeta&, const CheckpointMeta&) = default;
};

struct AdamSnapshot {
  AdamConfig config{};
  std::uint64_t step_count = 0;
  std::vector<TensorF> first_moments;
  std::vector<TensorF> second_moments;
};

// Serialized model: layer topology, weights in stack order, optional
// optimizer state, training metadata. The on-disk layout is a versioned
// little-endian binary format (see docs/formats.md); round trips are
// byte-exact.
struct ModelCheckpoint {
  std::uint32_t format_version = kCheckpointVersion;
  ArchitectureConfig arch;
  std::vector<TensorF> tensors;  // conv1 w,b, conv2 w,b, conv3 w,b, fc1 w,b, out w,b
  std::optional<AdamSnapshot> optimizer;
  CheckpointMeta meta;
};

// Expected parameter tensor shapes for an architecture, in stack order.
std::vector<std::vector<std::size_t>> checkpoint_tensor_shapes(
    const ArchitectureConfig& arch);

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

ModelCheckpoint checkpoint_from_model(Model<float>& model, CheckpointMeta meta,
                                      const AdamSnapshot* optimizer = nullptr);
Model<float> model_from_checkpoint(const ModelCheckpoint& ckpt);

}  // namespace playcomm::nn
