#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "playcomm/cluster/distance.hpp"
#include "playcomm/cluster/kmedoids.hpp"
#include "playcomm/cluster/report.hpp"
#include "playcomm/errors.hpp"
#include "playcomm/rng.hpp"
#include "support/tempdir.hpp"

using namespace playcomm;
using namespace playcomm::cluster;
using testsupport::TempDir;

namespace {

// Gaussian blobs around well-separated centers; inter-center distance is
// >= 10x the intra-blob spread.
std::vector<std::vector<double>> blobs(std::size_t per_blob, std::size_t centers,
                                       std::size_t dim, std::uint64_t seed,
                                       std::vector<std::size_t>* labels = nullptr) {
  Rng rng(seed);
  std::vector<std::vector<double>> points;
  for (std::size_t c = 0; c < centers; ++c) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      std::vector<double> p(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        p[d] = static_cast<double>(c) * 20.0 + rng.normal();
      }
      points.push_back(std::move(p));
      if (labels) labels->push_back(c);
    }
  }
  return points;
}

// Exhaustive optimum over all medoid pairs, for small n.
double exhaustive_best_pair(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        total += std::min(d(j, a), d(j, b));
      }
      best = std::min(best, total);
    }
  }
  return best;
}

}  // namespace

// ----------------------------------------------------------------- combine --

TEST_CASE("combine normalizes each block then concatenates") {
  std::vector<float> image{3.0f, 4.0f};
  std::vector<float> sentence(4, 0.0f);
  sentence[0] = 2.0f;
  const auto combined = combine(image, sentence);
  REQUIRE(combined.size() == 6);
  CHECK(combined[0] == doctest::Approx(0.6));
  CHECK(combined[1] == doctest::Approx(0.8));
  CHECK(combined[2] == doctest::Approx(1.0));
  CHECK(combined[3] == doctest::Approx(0.0));
}

TEST_CASE("combine is invariant to positive scaling of either block") {
  Rng rng(4);
  std::vector<float> image(8), sentence(8);
  for (std::size_t i = 0; i < 8; ++i) {
    image[i] = static_cast<float>(rng.normal());
    sentence[i] = static_cast<float>(rng.normal());
  }
  const auto base = combine(image, sentence);
  std::vector<float> image4 = image;
  for (auto& v : image4) v *= 4.0f;
  const auto scaled = combine(image4, sentence);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i] == doctest::Approx(scaled[i]).epsilon(1e-6));
  }
}

TEST_CASE("combine rejects zero blocks") {
  std::vector<float> zero(4, 0.0f);
  std::vector<float> ok{1.0f, 2.0f};
  CHECK_THROWS_AS(combine(zero, ok), std::invalid_argument);
  CHECK_THROWS_AS(combine(ok, zero), std::invalid_argument);
}

// ------------------------------------------------------------ mse distance --

TEST_CASE("mse distance basics and oracle") {
  std::vector<double> a{1.0, 1.0}, b{0.0, 0.0};
  CHECK(mse_distance(a, a) == 0.0);
  CHECK(mse_distance(a, b) == doctest::Approx(1.0));
  CHECK_THROWS_AS(mse_distance(a, std::vector<double>{1.0}), std::invalid_argument);

  Rng rng(5);
  std::vector<double> x(32), y(32);
  for (std::size_t i = 0; i < 32; ++i) {
    x[i] = rng.normal();
    y[i] = rng.normal();
  }
  double want = 0.0;
  for (std::size_t i = 0; i < 32; ++i) want += (x[i] - y[i]) * (x[i] - y[i]);
  want /= 32.0;
  CHECK(std::abs(mse_distance(x, y) - want) < 1e-12);
  CHECK(std::abs(mse_distance(x, y) - mse_distance(y, x)) < 1e-15);
}

// --------------------------------------------------------------- k-medoids --

TEST_CASE("k == n makes every point its own medoid with zero distortion") {
  const auto points = blobs(2, 3, 4, 6);
  DistanceMatrix d(points);
  const auto res = k_medoids(d, points.size(), 1);
  CHECK(res.distortion == 0.0);
  std::vector<std::size_t> sorted = res.medoids;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}

TEST_CASE("two well-separated blobs are recovered exactly") {
  std::vector<std::size_t> labels;
  const auto points = blobs(20, 2, 8, 7, &labels);
  DistanceMatrix d(points);
  const auto res = k_medoids(d, 2, 3);
  for (std::size_t i = 1; i < points.size(); ++i) {
    CHECK((res.assignments[i] == res.assignments[0]) == (labels[i] == labels[0]));
  }
}

TEST_CASE("PAM stays within 5% of the exhaustive optimum on small instances") {
  for (std::uint64_t trial = 0; trial < 30; ++trial) {
    Rng rng(100 + trial);
    const std::size_t n = 5 + rng.below(4);  // 5..8
    std::vector<std::vector<double>> points;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> p(3);
      for (auto& v : p) v = rng.normal();
      points.push_back(std::move(p));
    }
    DistanceMatrix d(points);
    const auto res = k_medoids(d, 2, trial);
    const double optimum = exhaustive_best_pair(d);
    CHECK(res.total_distance <= 1.05 * optimum + 1e-12);
  }
}

TEST_CASE("assignments form a partition with self-assigned medoids") {
  const auto points = blobs(10, 3, 6, 8);
  DistanceMatrix d(points);
  const auto res = k_medoids(d, 3, 5);
  REQUIRE(res.assignments.size() == points.size());
  for (std::size_t c = 0; c < res.medoids.size(); ++c) {
    CHECK(res.assignments[res.medoids[c]] == c);
  }
  // Every point is assigned to its nearest medoid.
  for (std::size_t j = 0; j < points.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : res.medoids) best = std::min(best, d(j, m));
    CHECK(d(j, res.medoids[res.assignments[j]]) == doctest::Approx(best));
  }
}

TEST_CASE("k_medoids rejects invalid k and duplicate-point degeneracy") {
  std::vector<std::vector<double>> points{{1.0, 1.0}, {1.0, 1.0}, {5.0, 5.0}};
  DistanceMatrix d(points);
  CHECK_THROWS_AS(k_medoids(d, 4, 1), std::invalid_argument);
  // Only 2 distinct points; k = 3 cannot be satisfied.
  CHECK_THROWS_WITH_AS(k_medoids(d, 3, 1), doctest::Contains("distinct"),
                       std::invalid_argument);
  CHECK_NOTHROW(k_medoids(d, 2, 1));
}

TEST_CASE("k_medoids is deterministic per seed") {
  const auto points = blobs(15, 3, 4, 9);
  DistanceMatrix d(points);
  const auto a = k_medoids(d, 3, 11);
  const auto b = k_medoids(d, 3, 11);
  CHECK(a.medoids == b.medoids);
  CHECK(a.assignments == b.assignments);
  CHECK(a.total_distance == b.total_distance);
}

// -------------------------------------------------------------- estimate_k --

TEST_CASE("three well-separated blobs select K=3") {
  const auto points = blobs(15, 3, 6, 10);
  DistanceMatrix d(points);
  const auto est = estimate_k(d, 2, 6, 1.15, 13);
  CHECK(est.selected_k == 3);
}

TEST_CASE("a single tight blob selects k_min on a flat curve") {
  // In high dimension the quantization gain of one extra cluster is small
  // ((1+1/K)^(2/d) for a Gaussian), so the ratio rule stops at k_min.
  Rng rng(14);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> p(16);
    for (auto& v : p) v = rng.normal();
    points.push_back(std::move(p));
  }
  DistanceMatrix d(points);
  const auto est = estimate_k(d, 2, 6, 1.15, 15);
  CHECK(est.selected_k == 2);
}

TEST_CASE("distortion curve is non-increasing and the run is deterministic") {
  const auto points = blobs(12, 4, 5, 16);
  DistanceMatrix d(points);
  const auto a = estimate_k(d, 2, 8, 1.15, 17);
  const auto b = estimate_k(d, 2, 8, 1.15, 17);
  CHECK(a.selected_k == b.selected_k);
  double last = std::numeric_limits<double>::infinity();
  for (const auto& [k, dist] : a.distortion_per_k) {
    CHECK(dist <= last + 1e-12);
    last = dist;
    CHECK(dist == b.distortion_per_k.at(k));
  }
}

TEST_CASE("estimate_k validates its range") {
  const auto points = blobs(4, 2, 3, 18);
  DistanceMatrix d(points);
  CHECK_THROWS_AS(estimate_k(d, 1, 4, 1.15, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_k(d, 4, 2, 1.15, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_k(d, 2, 100, 1.15, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_k(d, 2, 4, 0.9, 1), std::invalid_argument);
}

// ----------------------------------------------------------------- reports --

namespace {

data::Dataset report_dataset(const std::vector<std::size_t>& cluster_sizes,
                             ClusterReport* report) {
  data::Dataset ds;
  report->selected_k = cluster_sizes.size();
  std::size_t counter = 0;
  for (std::size_t c = 0; c < cluster_sizes.size(); ++c) {
    for (std::size_t i = 0; i < cluster_sizes[c]; ++i) {
      data::FrameCommentPair p;
      p.frame_id = "v:" + std::to_string(++counter);
      p.video_id = "v";
      p.timestamp_seconds = static_cast<double>(counter);
      p.frame_path = "path/" + std::to_string(counter);
      p.utterance_id = "u" + std::to_string(c);
      p.utterance_text = "utterance for cluster " + std::to_string(c);
      p.split = data::Split::train;
      if (i == 0) report->medoid_frame_ids.push_back(p.frame_id);
      report->assignments[p.frame_id] = c;
      ds.pairs.push_back(std::move(p));
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("medoid report sorts clusters largest-first (Table-1-like sizes)") {
  ClusterReport report;
  const auto ds = report_dataset({802, 1336, 684}, &report);
  const auto rows = medoid_report(report, ds);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].size == 1336);
  CHECK(rows[1].size == 802);
  CHECK(rows[2].size == 684);
  CHECK(rows[0].cluster_id == 1);
  // Sizes sum to the training-set size.
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size;
  CHECK(total == ds.pairs.size());

  const std::string table = format_medoid_table(rows);
  CHECK(table.find("1336") != std::string::npos);
  CHECK(table.find("utterance for cluster 1") != std::string::npos);
}

TEST_CASE("one-cluster report degenerates to a single row of size n") {
  ClusterReport report;
  const auto ds = report_dataset({17}, &report);
  const auto rows = medoid_report(report, ds);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].size == 17);
}

TEST_CASE("medoid report rejects dangling frame ids") {
  ClusterReport report;
  auto ds = report_dataset({5, 4}, &report);
  report.assignments["v:999"] = 0;
  CHECK_THROWS_WITH_AS(medoid_report(report, ds), doctest::Contains("v:999"),
                       InputError);
}

TEST_CASE("cluster reports round trip through their file format") {
  ClusterReport report;
  report_dataset({6, 3, 2}, &report);
  report.distortion_per_k = {{2, 0.5}, {3, 0.25}, {4, 0.249}};

  TempDir dir("clrep");
  write_cluster_report(report, dir.file("r.tsv"));
  const ClusterReport back = read_cluster_report(dir.file("r.tsv"));
  CHECK(back.selected_k == report.selected_k);
  CHECK(back.medoid_frame_ids == report.medoid_frame_ids);
  CHECK(back.assignments == report.assignments);
  CHECK(back.distortion_per_k == report.distortion_per_k);

  CHECK_THROWS_AS(read_cluster_report(dir.file("missing.tsv")), InputError);
}

TEST_CASE("cluster report validation catches inconsistencies") {
  ClusterReport report;
  report_dataset({4, 4}, &report);
  report.medoid_frame_ids[1] = "v:1";  // medoid of cluster 1 assigned to cluster 0
  CHECK_THROWS_AS(report.validate(), InputError);

  ClusterReport rising;
  report_dataset({4, 4}, &rising);
  rising.distortion_per_k = {{2, 0.1}, {3, 0.2}};  // curve must not increase
  CHECK_THROWS_WITH_AS(rising.validate(), doctest::Contains("increases"),
                       InputError);
}
