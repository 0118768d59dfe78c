#include "playcomm/cluster/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "playcomm/errors.hpp"

namespace playcomm::cluster {

std::vector<std::size_t> ClusterReport::cluster_sizes() const {
  std::vector<std::size_t> sizes(medoid_frame_ids.size(), 0);
  for (const auto& [frame, cluster] : assignments) {
    if (cluster >= sizes.size()) {
      throw InputError("cluster report: assignment of " + frame +
                       " references unknown cluster " + std::to_string(cluster));
    }
    ++sizes[cluster];
  }
  return sizes;
}

void ClusterReport::validate() const {
  if (selected_k == 0 || medoid_frame_ids.size() != selected_k) {
    throw InputError("cluster report: medoid count " +
                     std::to_string(medoid_frame_ids.size()) +
                     " does not match selected_k " + std::to_string(selected_k));
  }
  for (std::size_t c = 0; c < medoid_frame_ids.size(); ++c) {
    const auto it = assignments.find(medoid_frame_ids[c]);
    if (it == assignments.end() || it->second != c) {
      throw InputError("cluster report: medoid " + medoid_frame_ids[c] +
                       " is not assigned to its own cluster " + std::to_string(c));
    }
  }
  double last = std::numeric_limits<double>::infinity();
  for (const auto& [k, distortion] : distortion_per_k) {
    if (distortion > last + 1e-12) {
      throw InputError("cluster report: distortion curve increases at K=" +
                       std::to_string(k));
    }
    last = std::min(last, distortion);
  }
  cluster_sizes();  // checks assignment range
}

CombinedTrainingVectors combined_training_vectors(const data::Dataset& dataset) {
  CombinedTrainingVectors out;
  for (const auto& p : dataset.pairs) {
    if (p.split != data::Split::train) continue;
    if (p.sentence_embedding.empty()) {
      throw InputError("clustering: training frame " + p.frame_id +
                       " has no sentence embedding");
    }
    if (p.image_feature.empty()) {
      throw InputError("clustering: training frame " + p.frame_id +
                       " has no image feature");
    }
    if (out.image_dim == 0) out.image_dim = p.image_feature.size();
    out.vectors.push_back(combine(p.image_feature, p.sentence_embedding));
    out.frame_ids.push_back(p.frame_id);
  }
  if (out.vectors.empty()) {
    throw InputError("clustering: training split is empty");
  }
  return out;
}

ClusterReport cluster_training_split(const data::Dataset& dataset,
                                     std::size_t k_min, std::size_t k_max,
                                     double ratio_threshold, std::uint64_t seed) {
  const CombinedTrainingVectors combined = combined_training_vectors(dataset);
  const DistanceMatrix distances(combined.vectors);
  const KEstimate est =
      estimate_k(distances, k_min, k_max, ratio_threshold, seed);
  const KMedoidsResult& run = est.runs.at(est.selected_k);

  ClusterReport report;
  report.selected_k = est.selected_k;
  report.distortion_per_k = est.distortion_per_k;
  for (std::size_t m : run.medoids) {
    report.medoid_frame_ids.push_back(combined.frame_ids[m]);
  }
  for (std::size_t i = 0; i < combined.frame_ids.size(); ++i) {
    report.assignments[combined.frame_ids[i]] = run.assignments[i];
  }
  report.validate();
  return report;
}

std::vector<MedoidRow> medoid_report(const ClusterReport& report,
                                     const data::Dataset& dataset) {
  report.validate();
  std::map<std::string, const data::FrameCommentPair*> by_frame;
  for (const auto& p : dataset.pairs) by_frame[p.frame_id] = &p;
  for (const auto& [frame, cluster] : report.assignments) {
    if (!by_frame.contains(frame)) {
      throw InputError("medoid_report: frame " + frame +
                       " is not present in the dataset");
    }
  }

  const std::vector<std::size_t> sizes = report.cluster_sizes();
  std::vector<MedoidRow> rows;
  for (std::size_t c = 0; c < report.medoid_frame_ids.size(); ++c) {
    const data::FrameCommentPair* medoid = by_frame.at(report.medoid_frame_ids[c]);
    MedoidRow row;
    row.cluster_id = c;
    row.size = sizes[c];
    row.medoid_frame_id = medoid->frame_id;
    row.medoid_frame_path = medoid->frame_path;
    row.medoid_utterance = medoid->utterance_text;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const MedoidRow& a, const MedoidRow& b) {
                     return a.size > b.size;
                   });
  return rows;
}

std::string format_medoid_table(const std::vector<MedoidRow>& rows) {
  std::ostringstream os;
  os << "cluster  size  medoid_frame           medoid_utterance\n";
  for (const auto& r : rows) {
    char head[64];
    std::snprintf(head, sizeof(head), "%-7zu  %-4zu  ", r.cluster_id, r.size);
    os << head << r.medoid_frame_id << "  \"" << r.medoid_utterance << "\"\n";
  }
  return os.str();
}

namespace {
constexpr const char* kReportHeader = "#playcomm-clusters v1";
}

void write_cluster_report(const ClusterReport& report, const std::string& path) {
  report.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("write_cluster_report: cannot open " + path);
  out << kReportHeader << '\n';
  out << "selected_k\t" << report.selected_k << '\n';
  char buf[64];
  for (const auto& [k, d] : report.distortion_per_k) {
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    out << "distortion\t" << k << '\t' << buf << '\n';
  }
  for (std::size_t c = 0; c < report.medoid_frame_ids.size(); ++c) {
    out << "medoid\t" << c << '\t' << report.medoid_frame_ids[c] << '\n';
  }
  for (const auto& [frame, cluster] : report.assignments) {
    out << "assign\t" << frame << '\t' << cluster << '\n';
  }
  if (!out) throw std::runtime_error("write_cluster_report: write failed");
}

ClusterReport read_cluster_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("read_cluster_report: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw InputError(path + ": not a playcomm cluster report");
  }
  ClusterReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find('\t', pos);
      if (next == std::string::npos) next = line.size();
      cols.push_back(line.substr(pos, next - pos));
      pos = next + 1;
    }
    const std::string where = path + ":" + std::to_string(line_no);
    if (cols[0] == "selected_k" && cols.size() == 2) {
      report.selected_k = std::stoull(cols[1]);
    } else if (cols[0] == "distortion" && cols.size() == 3) {
      report.distortion_per_k[std::stoull(cols[1])] = std::stod(cols[2]);
    } else if (cols[0] == "medoid" && cols.size() == 3) {
      const std::size_t c = std::stoull(cols[1]);
      if (c != report.medoid_frame_ids.size()) {
        throw InputError(where + ": medoids out of order");
      }
      report.medoid_frame_ids.push_back(cols[2]);
    } else if (cols[0] == "assign" && cols.size() == 3) {
      if (report.assignments.contains(cols[1])) {
        throw InputError(where + ": duplicate assignment for " + cols[1]);
      }
      report.assignments[cols[1]] = std::stoull(cols[2]);
    } else {
      throw InputError(where + ": malformed line '" + line + "'");
    }
  }
  report.validate();
  return report;
}

}  // namespace playcomm::cluster
