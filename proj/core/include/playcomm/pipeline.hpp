#pragma once

#include <functional>
#include <map>
#include <string>

#include "playcomm/cluster/report.hpp"
#include "playcomm/data/dataset.hpp"
#include "playcomm/nn/checkpoint.hpp"
#include "playcomm/nn/train.hpp"

namespace playcomm::pipeline {

using EpochCallback = std::function<void(const std::string& label,
                                         std::size_t epoch, double loss)>;

// Decoded frames and embedding targets for a list of pairs, dataset order.
struct TrainingMatrices {
  Tensor<float> frames;   // [N,H,W,3]
  Tensor<float> targets;  // [N,512]
};
TrainingMatrices load_training_matrices(const data::Dataset& dataset,
                                        const std::vector<std::size_t>& pair_indices,
                                        const nn::ArchitectureConfig& arch);

struct TrainOutcome {
  nn::ModelCheckpoint checkpoint;
  nn::TrainResult result;
};

// Trains one model on the whole training split.
TrainOutcome train_whole(const data::Dataset& dataset,
                         const nn::ArchitectureConfig& arch,
                         const nn::TrainConfig& config,
                         const EpochCallback& on_epoch = {});

// Trains one model per cluster whose training membership reaches
// min_cluster_size, each with the same architecture and config. Rejects
// the call (listing cluster sizes) when no cluster qualifies.
std::map<std::size_t, TrainOutcome> train_per_cluster(
    const data::Dataset& dataset, const cluster::ClusterReport& report,
    const nn::ArchitectureConfig& arch, const nn::TrainConfig& config,
    std::size_t min_cluster_size = 50, const EpochCallback& on_epoch = {});

}  // namespace playcomm::pipeline
