#include "playcomm/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "playcomm/errors.hpp"

namespace playcomm::pipeline {

TrainingMatrices load_training_matrices(
    const data::Dataset& dataset, const std::vector<std::size_t>& pair_indices,
    const nn::ArchitectureConfig& arch) {
  if (pair_indices.empty()) {
    throw InputError("training: no pairs to train on");
  }
  if (arch.output_dim != text::kEmbeddingDim) {
    throw InputError("training: architecture output_dim " +
                     std::to_string(arch.output_dim) +
                     " does not match the embedding dimension " +
                     std::to_string(text::kEmbeddingDim));
  }
  std::vector<std::string> paths;
  for (std::size_t idx : pair_indices) {
    const auto& p = dataset.pairs[idx];
    if (p.sentence_embedding.size() != text::kEmbeddingDim) {
      throw InputError("training: frame " + p.frame_id +
                       " has no sentence embedding; ingest embeddings first");
    }
    paths.push_back(p.frame_path);
  }

  TrainingMatrices out;
  out.frames = data::decode_frames(paths, arch.input_height, arch.input_width);
  out.targets = Tensor<float>({pair_indices.size(), text::kEmbeddingDim});
  for (std::size_t i = 0; i < pair_indices.size(); ++i) {
    const auto& emb = dataset.pairs[pair_indices[i]].sentence_embedding;
    std::copy(emb.begin(), emb.end(),
              out.targets.data() + i * text::kEmbeddingDim);
  }
  return out;
}

namespace {

TrainOutcome train_subset(const data::Dataset& dataset,
                          const std::vector<std::size_t>& pair_indices,
                          const nn::ArchitectureConfig& arch,
                          const nn::TrainConfig& config,
                          const std::string& label,
                          const EpochCallback& on_epoch) {
  const TrainingMatrices mats = load_training_matrices(dataset, pair_indices, arch);
  nn::Model<float> model(arch, config.seed);
  nn::TrainResult result = nn::train<float>(
      model, mats.frames, mats.targets, config,
      [&](std::size_t epoch, double loss) {
        if (on_epoch) on_epoch(label, epoch, loss);
      });

  nn::CheckpointMeta meta;
  meta.seed = config.seed;
  meta.epochs_run = static_cast<std::uint32_t>(result.epochs_run);
  meta.final_loss = result.final_loss;
  meta.label = label;

  std::uint64_t h = kFnvOffset;
  for (std::size_t idx : pair_indices) {
    h = fnv1a64(dataset.pairs[idx].frame_id, h);
    h = fnv1a64("|", h);
  }
  meta.dataset_fingerprint = h;

  TrainOutcome outcome{nn::checkpoint_from_model(model, std::move(meta)),
                       std::move(result)};
  return outcome;
}

}  // namespace

TrainOutcome train_whole(const data::Dataset& dataset,
                         const nn::ArchitectureConfig& arch,
                         const nn::TrainConfig& config,
                         const EpochCallback& on_epoch) {
  const std::vector<std::size_t> train_indices =
      dataset.indices(data::Split::train);
  if (train_indices.empty()) {
    throw InputError("train_whole: training split is empty");
  }
  return train_subset(dataset, train_indices, arch, config, "cnn", on_epoch);
}

std::map<std::size_t, TrainOutcome> train_per_cluster(
    const data::Dataset& dataset, const cluster::ClusterReport& report,
    const nn::ArchitectureConfig& arch, const nn::TrainConfig& config,
    std::size_t min_cluster_size, const EpochCallback& on_epoch) {
  report.validate();

  // Cluster membership restricted to the training split, dataset order.
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
    const auto& p = dataset.pairs[i];
    if (p.split != data::Split::train) continue;
    const auto it = report.assignments.find(p.frame_id);
    if (it == report.assignments.end()) {
      throw InputError("train_per_cluster: training frame " + p.frame_id +
                       " is missing from the cluster report");
    }
    members[it->second].push_back(i);
  }

  std::vector<std::size_t> qualifying;
  for (std::size_t c = 0; c < report.medoid_frame_ids.size(); ++c) {
    const auto it = members.find(c);
    if (it != members.end() && it->second.size() >= min_cluster_size) {
      qualifying.push_back(c);
    }
  }
  if (qualifying.empty()) {
    std::ostringstream os;
    os << "train_per_cluster: no cluster reaches min size "
       << min_cluster_size << "; sizes:";
    for (std::size_t c = 0; c < report.medoid_frame_ids.size(); ++c) {
      const auto it = members.find(c);
      os << " cluster " << c << "=" << (it == members.end() ? 0 : it->second.size());
    }
    throw InputError(os.str());
  }

  std::map<std::size_t, TrainOutcome> out;
  for (std::size_t c : qualifying) {
    const std::string label = "cluster-" + std::to_string(c) + "-cnn";
    out.emplace(c, train_subset(dataset, members.at(c), arch, config, label,
                                on_epoch));
  }
  return out;
}

}  // namespace playcomm::pipeline
