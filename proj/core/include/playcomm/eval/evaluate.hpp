#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "playcomm/cluster/report.hpp"
#include "playcomm/data/dataset.hpp"
#include "playcomm/nn/checkpoint.hpp"

namespace playcomm::eval {

// Rank-based percentile of the true embedding among a candidate pool,
// ordered by Euclidean distance to the prediction. 0 is perfect, 1 worst.
double percentile_error(std::span<const float> pred, std::size_t true_index,
                        const std::vector<std::vector<float>>& pool);

// Convenience overload locating true_emb in the pool by exact equality.
double percentile_error(std::span<const float> pred,
                        std::span<const float> true_emb,
                        const std::vector<std::vector<float>>& pool);

enum class PoolPolicy { test, train, combined };

struct EvaluationReport {
  std::string model_label;
  double mean_percentile_error = 0.0;
  double std_percentile_error = 0.0;  // population standard deviation
  std::size_t training_set_size = 0;
  std::size_t test_set_size = 0;
  std::vector<double> per_instance;
  std::size_t excluded = 0;           // unassignable test instances
  bool no_test_coverage = false;
};

// Predicts every test frame and scores it against the pool chosen by
// `policy` (default: all test-split true embeddings).
EvaluationReport evaluate(const nn::ModelCheckpoint& checkpoint,
                          const data::Dataset& dataset,
                          PoolPolicy policy = PoolPolicy::test);

// Baseline evaluation: each test instance goes to the cluster whose medoid
// has the nearest image feature (sentence blocks are unknown at test time),
// then that cluster's model is scored. Rows come back sorted by training
// set size, descending. Instances without image features are excluded and
// counted.
std::vector<EvaluationReport> evaluate_clustered(
    const std::map<std::size_t, nn::ModelCheckpoint>& per_cluster,
    const data::Dataset& dataset, const cluster::ClusterReport& report,
    PoolPolicy policy = PoolPolicy::test);

// Table-1-shaped text table: label, error +- dispersion, training set size.
std::string format_report_table(const std::vector<EvaluationReport>& rows);

// One JSON object per row.
std::string report_json_lines(const std::vector<EvaluationReport>& rows);

void write_report_files(const std::vector<EvaluationReport>& rows,
                        const std::string& base_path);

}  // namespace playcomm::eval
