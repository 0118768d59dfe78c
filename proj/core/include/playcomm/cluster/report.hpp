#pragma once

#include <map>
#include <string>
#include <vector>

#include "playcomm/cluster/kmedoids.hpp"
#include "playcomm/data/dataset.hpp"

namespace playcomm::cluster {

// Clustering outcome keyed by frame ids so it survives dataset reordering.
struct ClusterReport {
  std::size_t selected_k = 0;
  std::vector<std::string> medoid_frame_ids;        // cluster id == index
  std::map<std::string, std::size_t> assignments;   // frame_id -> cluster id
  std::map<std::size_t, double> distortion_per_k;

  std::vector<std::size_t> cluster_sizes() const;
  void validate() const;
};

// Combined image+sentence vectors for every training pair, in dataset
// order. Requires full embedding and image-feature coverage of the split.
struct CombinedTrainingVectors {
  std::vector<std::vector<double>> vectors;
  std::vector<std::string> frame_ids;
  std::size_t image_dim = 0;
};
CombinedTrainingVectors combined_training_vectors(const data::Dataset& dataset);

// Runs the full clustering stage over the training split.
ClusterReport cluster_training_split(const data::Dataset& dataset,
                                     std::size_t k_min, std::size_t k_max,
                                     double ratio_threshold, std::uint64_t seed);

struct MedoidRow {
  std::size_t cluster_id = 0;
  std::size_t size = 0;
  std::string medoid_frame_id;
  std::string medoid_frame_path;
  std::string medoid_utterance;
};

// Per-cluster summary rows sorted by size descending.
std::vector<MedoidRow> medoid_report(const ClusterReport& report,
                                     const data::Dataset& dataset);

std::string format_medoid_table(const std::vector<MedoidRow>& rows);

void write_cluster_report(const ClusterReport& report, const std::string& path);
ClusterReport read_cluster_report(const std::string& path);

}  // namespace playcomm::cluster
