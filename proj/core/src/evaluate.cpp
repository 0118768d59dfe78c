#include "playcomm/eval/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "playcomm/cluster/distance.hpp"
#include "playcomm/errors.hpp"

namespace playcomm::eval {

namespace {

double squared_distance(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

struct PoolView {
  std::vector<std::vector<float>> vectors;
  std::map<std::string, std::size_t> index_by_frame;  // member instances
};

PoolView build_pool(const data::Dataset& dataset, PoolPolicy policy) {
  PoolView pool;
  auto include = [&](const data::FrameCommentPair& p) {
    switch (policy) {
      case PoolPolicy::test: return p.split == data::Split::test;
      case PoolPolicy::train: return p.split == data::Split::train;
      case PoolPolicy::combined: return true;
    }
    return false;
  };
  for (const auto& p : dataset.pairs) {
    if (!include(p)) continue;
    if (p.sentence_embedding.empty()) {
      throw InputError("evaluate: frame " + p.frame_id +
                       " has no sentence embedding; ingest embeddings first");
    }
    pool.index_by_frame[p.frame_id] = pool.vectors.size();
    pool.vectors.push_back(p.sentence_embedding);
  }
  return pool;
}

void summarize(EvaluationReport& report) {
  const std::size_t n = report.per_instance.size();
  if (n == 0) return;
  double mean = 0.0;
  for (double v : report.per_instance) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : report.per_instance) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  report.mean_percentile_error = mean;
  report.std_percentile_error = std::sqrt(var);
}

// Scores the given test pairs with one model. pool_extra holds the pool
// index of each pair's own embedding, or npos when it is not a member.
void score_instances(const nn::ModelCheckpoint& checkpoint,
                     const data::Dataset& dataset,
                     const std::vector<std::size_t>& pair_indices,
                     const PoolView& pool, EvaluationReport& report) {
  nn::Model<float> model = nn::model_from_checkpoint(checkpoint);
  const auto& arch = checkpoint.arch;
  constexpr std::size_t kBatch = 64;

  for (std::size_t begin = 0; begin < pair_indices.size(); begin += kBatch) {
    const std::size_t count = std::min(kBatch, pair_indices.size() - begin);
    std::vector<std::string> paths;
    for (std::size_t i = 0; i < count; ++i) {
      paths.push_back(dataset.pairs[pair_indices[begin + i]].frame_path);
    }
    const Tensor<float> frames =
        data::decode_frames(paths, arch.input_height, arch.input_width);
    const Tensor<float> preds = model.predict(frames);

    for (std::size_t i = 0; i < count; ++i) {
      const auto& pair = dataset.pairs[pair_indices[begin + i]];
      std::span<const float> pred(preds.data() + i * arch.output_dim,
                                  arch.output_dim);
      const auto member = pool.index_by_frame.find(pair.frame_id);
      if (member != pool.index_by_frame.end()) {
        report.per_instance.push_back(
            percentile_error(pred, member->second, pool.vectors));
      } else {
        // Not a pool member (train/combined policies): rank the true
        // embedding against the whole pool.
        const std::vector<float>& true_emb = pair.sentence_embedding;
        const double d_true =
            squared_distance(pred, std::span<const float>(true_emb));
        std::size_t closer = 0;
        for (const auto& cand : pool.vectors) {
          if (squared_distance(pred, std::span<const float>(cand)) < d_true) {
            ++closer;
          }
        }
        report.per_instance.push_back(static_cast<double>(closer) /
                                      static_cast<double>(pool.vectors.size()));
      }
    }
  }
  summarize(report);
}

}  // namespace

double percentile_error(std::span<const float> pred, std::size_t true_index,
                        const std::vector<std::vector<float>>& pool) {
  if (pool.size() < 2) {
    throw std::invalid_argument("percentile_error: pool must hold at least 2 vectors");
  }
  if (true_index >= pool.size()) {
    throw std::invalid_argument("percentile_error: true_index out of range");
  }
  for (const auto& v : pool) {
    if (v.size() != pred.size()) {
      throw std::invalid_argument("percentile_error: pool vector length " +
                                  std::to_string(v.size()) +
                                  " does not match prediction length " +
                                  std::to_string(pred.size()));
    }
  }
  const double d_true =
      squared_distance(pred, std::span<const float>(pool[true_index]));
  std::size_t closer = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (i == true_index) continue;
    if (squared_distance(pred, std::span<const float>(pool[i])) < d_true) {
      ++closer;
    }
  }
  return static_cast<double>(closer) / static_cast<double>(pool.size() - 1);
}

double percentile_error(std::span<const float> pred,
                        std::span<const float> true_emb,
                        const std::vector<std::vector<float>>& pool) {
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].size() == true_emb.size() &&
        std::equal(pool[i].begin(), pool[i].end(), true_emb.begin())) {
      return percentile_error(pred, i, pool);
    }
  }
  throw std::invalid_argument("percentile_error: true embedding is not in the pool");
}

EvaluationReport evaluate(const nn::ModelCheckpoint& checkpoint,
                          const data::Dataset& dataset, PoolPolicy policy) {
  const std::vector<std::size_t> test_indices = dataset.indices(data::Split::test);
  if (test_indices.empty()) {
    throw InputError("evaluate: test split is empty");
  }
  const PoolView pool = build_pool(dataset, policy);
  if (pool.vectors.size() < 2) {
    throw InputError("evaluate: candidate pool has fewer than 2 embeddings");
  }

  EvaluationReport report;
  report.model_label = checkpoint.meta.label.empty() ? "cnn" : checkpoint.meta.label;
  report.training_set_size = dataset.count(data::Split::train);
  report.test_set_size = test_indices.size();
  score_instances(checkpoint, dataset, test_indices, pool, report);
  return report;
}

std::vector<EvaluationReport> evaluate_clustered(
    const std::map<std::size_t, nn::ModelCheckpoint>& per_cluster,
    const data::Dataset& dataset, const cluster::ClusterReport& report,
    PoolPolicy policy) {
  report.validate();
  const std::vector<std::size_t> test_indices = dataset.indices(data::Split::test);
  if (test_indices.empty()) {
    throw InputError("evaluate_clustered: test split is empty");
  }

  std::map<std::string, const data::FrameCommentPair*> by_frame;
  for (const auto& p : dataset.pairs) by_frame[p.frame_id] = &p;

  // Medoid image blocks, L2-normalized like the combined vectors were.
  std::vector<std::vector<double>> medoid_blocks;
  for (const auto& frame_id : report.medoid_frame_ids) {
    const auto it = by_frame.find(frame_id);
    if (it == by_frame.end() || it->second->image_feature.empty()) {
      throw InputError("evaluate_clustered: medoid " + frame_id +
                       " has no image feature in the dataset");
    }
    medoid_blocks.push_back(
        cluster::normalize_block(it->second->image_feature, "image"));
  }

  const PoolView pool = build_pool(dataset, policy);

  std::map<std::size_t, std::vector<std::size_t>> assigned;
  std::size_t excluded = 0;
  for (std::size_t idx : test_indices) {
    const auto& pair = dataset.pairs[idx];
    if (pair.image_feature.empty()) {
      ++excluded;
      continue;
    }
    const std::vector<double> block =
        cluster::normalize_block(pair.image_feature, "image");
    std::size_t best = 0;
    double best_d = cluster::mse_distance(block, medoid_blocks[0]);
    for (std::size_t c = 1; c < medoid_blocks.size(); ++c) {
      const double d = cluster::mse_distance(block, medoid_blocks[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assigned[best].push_back(idx);
  }

  const std::vector<std::size_t> sizes = report.cluster_sizes();
  std::vector<EvaluationReport> rows;
  for (const auto& [cluster_id, checkpoint] : per_cluster) {
    if (cluster_id >= report.medoid_frame_ids.size()) {
      throw InputError("evaluate_clustered: checkpoint for unknown cluster " +
                       std::to_string(cluster_id));
    }
    EvaluationReport row;
    row.model_label = checkpoint.meta.label.empty()
                          ? "cluster-" + std::to_string(cluster_id)
                          : checkpoint.meta.label;
    row.training_set_size = sizes[cluster_id];
    row.excluded = excluded;
    const auto it = assigned.find(cluster_id);
    if (it == assigned.end() || it->second.empty()) {
      row.no_test_coverage = true;
      rows.push_back(std::move(row));
      continue;
    }
    row.test_set_size = it->second.size();
    score_instances(checkpoint, dataset, it->second, pool, row);
    rows.push_back(std::move(row));
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const EvaluationReport& a, const EvaluationReport& b) {
                     return a.training_set_size > b.training_set_size;
                   });
  return rows;
}

std::string format_report_table(const std::vector<EvaluationReport>& rows) {
  std::ostringstream os;
  os << "Model                        Percentile Error     Training Set Size\n";
  for (const auto& r : rows) {
    char line[160];
    if (r.no_test_coverage) {
      std::snprintf(line, sizeof(line), "%-28s %-20s %zu\n",
                    r.model_label.c_str(), "no test coverage",
                    r.training_set_size);
    } else {
      char val[48];
      std::snprintf(val, sizeof(val), "%.3f +- %.3f", r.mean_percentile_error,
                    r.std_percentile_error);
      std::snprintf(line, sizeof(line), "%-28s %-20s %zu\n",
                    r.model_label.c_str(), val, r.training_set_size);
    }
    os << line;
  }
  return os.str();
}

std::string report_json_lines(const std::vector<EvaluationReport>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    nlohmann::json j;
    j["model"] = r.model_label;
    j["mean_percentile_error"] = r.mean_percentile_error;
    j["std_percentile_error"] = r.std_percentile_error;
    j["training_set_size"] = r.training_set_size;
    j["test_set_size"] = r.test_set_size;
    j["excluded"] = r.excluded;
    j["no_test_coverage"] = r.no_test_coverage;
    os << j.dump() << '\n';
  }
  return os.str();
}

void write_report_files(const std::vector<EvaluationReport>& rows,
                        const std::string& base_path) {
  {
    std::ofstream out(base_path + ".txt", std::ios::trunc);
    if (!out) throw InputError("cannot open " + base_path + ".txt");
    out << format_report_table(rows);
  }
  {
    std::ofstream out(base_path + ".jsonl", std::ios::trunc);
    if (!out) throw InputError("cannot open " + base_path + ".jsonl");
    out << report_json_lines(rows);
  }
}

}  // namespace playcomm::eval
