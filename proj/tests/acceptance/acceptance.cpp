// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// gating criterion fails. Criterion 9 needs externally supplied data and is
// reported as SKIP when PLAYCOMM_DATASET_DIR is unset.
//
// Usage: acceptance --cli <path-to-playcomm-binary>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "playcomm/cluster/kmedoids.hpp"
#include "playcomm/data/dataset.hpp"
#include "playcomm/errors.hpp"
#include "playcomm/eval/evaluate.hpp"
#include "playcomm/eval/retrieval.hpp"
#include "playcomm/nn/checkpoint.hpp"
#include "playcomm/nn/loss.hpp"
#include "playcomm/nn/train.hpp"
#include "playcomm/text/fallback_embedder.hpp"
#include "support/cli_runner.hpp"
#include "support/minicorpus.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace playcomm;
using oracles::central_diff;
using oracles::rel_err;
using testsupport::run_cli;
using testsupport::TempDir;

namespace {

std::string g_cli;

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

template <typename T>
Tensor<T> random_tensor(std::vector<std::size_t> shape, Rng& rng, bool unit_range) {
  Tensor<T> t(std::move(shape));
  for (std::size_t i = 0; i < t.numel(); ++i) {
    t[i] = static_cast<T>(unit_range ? rng.uniform() : rng.normal());
  }
  return t;
}

// ------------------------------------------------ criterion 1: gradients --

void per_layer_gradients(Check& c) {
  using namespace playcomm::nn;
  Rng rng(101);
  const double h = 1e-6;

  {  // conv2d
    TensorD input = random_tensor<double>({2, 6, 5, 3}, rng, false);
    TensorD weights = random_tensor<double>({3, 3, 3, 4}, rng, false);
    TensorD biases = random_tensor<double>({4}, rng, false);
    TensorD out0 = conv2d_forward(input, weights, biases, 1, Padding::same);
    TensorD proj = random_tensor<double>(out0.shape(), rng, false);
    auto loss = [&]() {
      TensorD out = conv2d_forward(input, weights, biases, 1, Padding::same);
      double acc = 0.0;
      for (std::size_t i = 0; i < out.numel(); ++i) acc += proj[i] * out[i];
      return acc;
    };
    auto grads = conv2d_backward(proj, input, weights, 1, Padding::same);
    for (int s = 0; s < 20; ++s) {
      const std::size_t wi = rng.below(weights.numel());
      c.expect(rel_err(grads.weights[wi], central_diff(loss, &weights[wi], h)) < 1e-6,
               "conv weight gradient off");
      const std::size_t ii = rng.below(input.numel());
      c.expect(rel_err(grads.input[ii], central_diff(loss, &input[ii], h)) < 1e-6,
               "conv input gradient off");
    }
  }

  {  // dense
    TensorD input = random_tensor<double>({4, 7}, rng, false);
    TensorD weights = random_tensor<double>({7, 5}, rng, false);
    TensorD biases = random_tensor<double>({5}, rng, false);
    TensorD proj = random_tensor<double>({4, 5}, rng, false);
    auto loss = [&]() {
      TensorD out = dense_forward(input, weights, biases);
      double acc = 0.0;
      for (std::size_t i = 0; i < out.numel(); ++i) acc += proj[i] * out[i];
      return acc;
    };
    auto grads = dense_backward(proj, input, weights);
    for (int s = 0; s < 20; ++s) {
      const std::size_t wi = rng.below(weights.numel());
      c.expect(rel_err(grads.weights[wi], central_diff(loss, &weights[wi], h)) < 1e-6,
               "dense weight gradient off");
      const std::size_t ii = rng.below(input.numel());
      c.expect(rel_err(grads.input[ii], central_diff(loss, &input[ii], h)) < 1e-6,
               "dense input gradient off");
      const std::size_t bi = rng.below(biases.numel());
      c.expect(rel_err(grads.biases[bi], central_diff(loss, &biases[bi], h)) < 1e-6,
               "dense bias gradient off");
    }
  }

  {  // maxpool
    TensorD input = random_tensor<double>({1, 8, 8, 2}, rng, false);
    auto res0 = maxpool2d_forward(input, 2, 2);
    TensorD proj = random_tensor<double>(res0.output.shape(), rng, false);
    auto loss = [&]() {
      auto res = maxpool2d_forward(input, 2, 2);
      double acc = 0.0;
      for (std::size_t i = 0; i < res.output.numel(); ++i) acc += proj[i] * res.output[i];
      return acc;
    };
    TensorD gi = maxpool2d_backward(proj, res0);
    for (int s = 0; s < 20; ++s) {
      const std::size_t i = rng.below(input.numel());
      c.expect(rel_err(gi[i], central_diff(loss, &input[i], 1e-7)) < 1e-6,
               "maxpool gradient off");
    }
  }

  {  // leaky relu
    TensorD input = random_tensor<double>({128}, rng, false);
    TensorD proj = random_tensor<double>({128}, rng, false);
    auto loss = [&]() {
      TensorD out = leaky_relu_forward(input, 0.01);
      double acc = 0.0;
      for (std::size_t i = 0; i < out.numel(); ++i) acc += proj[i] * out[i];
      return acc;
    };
    TensorD gi = leaky_relu_backward(proj, input, 0.01);
    int done = 0;
    for (std::size_t i = 0; i < input.numel() && done < 20; ++i) {
      if (std::abs(input[i]) < 1e-3) continue;
      c.expect(rel_err(gi[i], central_diff(loss, &input[i], 1e-4)) < 1e-6,
               "leaky relu gradient off");
      ++done;
    }
  }

  {  // dropout with a pinned mask
    TensorD input = random_tensor<double>({128}, rng, false);
    TensorD proj = random_tensor<double>({128}, rng, false);
    auto loss = [&]() {
      Rng mask_rng(2024);
      auto res = dropout_forward(input, 0.9, Mode::train, mask_rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < res.output.numel(); ++i) acc += proj[i] * res.output[i];
      return acc;
    };
    Rng mask_rng(2024);
    auto res = dropout_forward(input, 0.9, Mode::train, mask_rng);
    TensorD gi = dropout_backward(proj, res.mask, 0.9);
    for (int s = 0; s < 20; ++s) {
      const std::size_t i = rng.below(input.numel());
      c.expect(rel_err(gi[i], central_diff(loss, &input[i], 1e-5)) < 1e-6,
               "dropout gradient off");
    }
  }
}

void full_stack_gradients(Check& c) {
  using namespace playcomm::nn;
  ArchitectureConfig arch;
  arch.input_height = 32;
  arch.input_width = 32;
  Model<double> model(arch, 7);

  Rng rng(102);
  TensorD frames = random_tensor<double>({2, 32, 32, 3}, rng, true);
  TensorD targets = random_tensor<double>({2, 512}, rng, false);

  auto loss = [&]() {
    Rng drop(555);
    TensorD pred = model.forward(frames, Mode::train, drop);
    return mse_loss(pred, targets).loss;
  };

  Rng drop(555);
  TensorD pred = model.forward(frames, Mode::train, drop);
  auto res = mse_loss(pred, targets);
  model.backward(res.grad);

  Rng pick(103);
  auto refs = model.params();
  int samples = 0;
  while (samples < 24) {
    auto& ref = refs[pick.below(refs.size())];
    const std::size_t i = pick.below(ref.value->numel());
    const double analytic = (*ref.grad)[i];
    const double numeric = central_diff(loss, &(*ref.value)[i], 1e-5);
    c.expect(rel_err(analytic, numeric, 1e-4) < 1e-4,
             "full-stack gradient off at " + ref.name);
    ++samples;
  }
}

bool criterion1(std::string& detail) {
  Check c;
  per_layer_gradients(c);
  full_stack_gradients(c);
  detail = c.detail;
  return c.ok;
}

// ----------------------------------------------- criterion 2: adam oracle --

bool criterion2(std::string& detail) {
  using namespace playcomm::nn;
  Check c;
  AdamConfig cfg;

  {  // single step, hand-derived
    TensorD param({1}, {1.0});
    TensorD grad({1}, {1.0});
    TensorD m({1}), v({1});
    adam_update(param, grad, m, v, 1, cfg);
    const double expected = 1.0 - 1e-3 / (1.0 + 1e-8);
    c.expect(std::abs(param[0] - expected) < 1e-12,
             "single-step value off by " + std::to_string(param[0] - expected));
  }

  {  // double step with identical gradients, scripted recurrence
    double rm = 0.0, rv = 0.0, rp = 1.0;
    TensorD param({1}, {1.0});
    TensorD grad({1}, {1.0});
    TensorD m({1}), v({1});
    for (int t = 1; t <= 2; ++t) {
      adam_update(param, grad, m, v, static_cast<std::uint64_t>(t), cfg);
      rm = cfg.beta1 * rm + (1 - cfg.beta1) * 1.0;
      rv = cfg.beta2 * rv + (1 - cfg.beta2) * 1.0;
      const double mh = rm / (1 - std::pow(cfg.beta1, t));
      const double vh = rv / (1 - std::pow(cfg.beta2, t));
      rp -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.epsilon);
      c.expect(std::abs(param[0] - rp) < 1e-12,
               "step " + std::to_string(t) + " deviates from the recurrence");
    }
  }
  detail = c.detail;
  return c.ok;
}

// -------------------------------------------- criterion 3: overfit sanity --

bool criterion3(std::string& detail) {
  using namespace playcomm::nn;
  Check c;

  ArchitectureConfig arch;
  arch.input_height = 32;
  arch.input_width = 32;

  Rng frame_rng(301);
  TensorF frames = random_tensor<float>({50, 32, 32, 3}, frame_rng, true);

  text::FallbackEmbedder embedder({17});
  TensorF targets({50, text::kEmbeddingDim});
  for (std::size_t i = 0; i < 50; ++i) {
    const auto emb =
        embedder.embed("synthetic commentary number " + std::to_string(i) +
                       " about the gameplay");
    std::copy(emb.vector.begin(), emb.vector.end(),
              targets.data() + i * text::kEmbeddingDim);
  }

  TrainConfig config;
  config.batch_size = 32;
  config.max_epochs = 200;
  config.seed = 99;

  auto run_once = [&](std::vector<char>* bytes) {
    Model<float> model(arch, config.seed);
    TrainResult result = train(model, frames, targets, config);
    if (bytes) {
      CheckpointMeta meta;
      meta.seed = config.seed;
      meta.epochs_run = static_cast<std::uint32_t>(result.epochs_run);
      meta.final_loss = result.final_loss;
      TempDir dir("accept3");
      const std::string path = dir.file("run.ckpt");
      save_checkpoint(checkpoint_from_model(model, meta), path);
      const std::string raw = testsupport::slurp_bytes(path);
      bytes->assign(raw.begin(), raw.end());
    }
    return result;
  };

  std::vector<char> bytes_a, bytes_b;
  const TrainResult ra = run_once(&bytes_a);
  c.expect(ra.epochs_run <= 200, "ran past 200 epochs");
  c.expect(!ra.loss_history.empty(), "no loss history");
  const double first = ra.loss_history.front();
  const double final_loss = ra.final_loss;
  c.expect(final_loss < 0.10 * first,
           "final loss " + std::to_string(final_loss) + " not below 10% of epoch-1 " +
               std::to_string(first));

  const TrainResult rb = run_once(&bytes_b);
  c.expect(ra.loss_history == rb.loss_history, "loss histories differ across runs");
  c.expect(bytes_a == bytes_b, "checkpoints are not bit-identical");

  detail = c.detail;
  if (c.ok) {
    detail = "final/epoch1 = " + std::to_string(final_loss / first) + " after " +
             std::to_string(ra.epochs_run) + " epochs";
  }
  return c.ok;
}

// ------------------------------------------ criterion 4: clustering oracles --

bool criterion4(std::string& detail) {
  using namespace playcomm::cluster;
  Check c;

  // (a) PAM vs exhaustive optimum, n <= 8, k = 2, 100 trials.
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Rng rng(400 + trial);
    const std::size_t n = 4 + rng.below(5);  // 4..8
    std::vector<std::vector<double>> points;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> p(3);
      for (auto& v : p) v = rng.normal();
      points.push_back(std::move(p));
    }
    DistanceMatrix d(points);
    const auto res = k_medoids(d, 2, trial);

    double optimum = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) total += std::min(d(j, a), d(j, b));
        optimum = std::min(optimum, total);
      }
    }
    c.expect(res.total_distance <= 1.05 * optimum + 1e-12,
             "trial " + std::to_string(trial) + ": PAM " +
                 std::to_string(res.total_distance) + " vs optimum " +
                 std::to_string(optimum));
  }

  // (b) three separated blobs: K=3 selected, assignments recover the blobs.
  // 16-d keeps the within-blob distortion curve flat, so the only elbow is
  // the real one; inter-center distance is far beyond 10x the blob spread.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(4000 + seed);
    std::vector<std::vector<double>> points;
    std::vector<std::size_t> labels;
    for (std::size_t blob = 0; blob < 3; ++blob) {
      for (int i = 0; i < 40; ++i) {
        std::vector<double> p(16);
        for (auto& v : p) v = static_cast<double>(blob) * 20.0 + rng.normal();
        points.push_back(std::move(p));
        labels.push_back(blob);
      }
    }
    DistanceMatrix d(points);
    const auto est = estimate_k(d, 2, 6, 1.15, seed);
    c.expect(est.selected_k == 3,
             "seed " + std::to_string(seed) + ": selected K=" +
                 std::to_string(est.selected_k));
    if (est.selected_k != 3) continue;

    const auto& run = est.runs.at(3);
    bool exact = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        if ((run.assignments[i] == run.assignments[j]) != (labels[i] == labels[j])) {
          exact = false;
        }
      }
    }
    c.expect(exact, "seed " + std::to_string(seed) + ": blob recovery inexact");
  }

  detail = c.detail;
  return c.ok;
}

// ------------------------------------- criterion 5: metric calibration --

bool criterion5(std::string& detail) {
  using namespace playcomm::eval;
  Check c;
  Rng rng(500);

  std::vector<std::vector<float>> pool;
  for (int i = 0; i < 1000; ++i) {
    std::vector<float> v(512);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    pool.push_back(std::move(v));
  }

  // Oracle predictor: exactly 0.0 mean.
  double oracle_mean = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    oracle_mean += percentile_error(pool[i], i, pool);
  }
  c.expect(oracle_mean == 0.0, "oracle mean " + std::to_string(oracle_mean));

  // Random predictor: mean in [0.45, 0.55] over 1000 trials.
  double random_mean = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<float> pred(512);
    for (auto& x : pred) x = static_cast<float>(rng.normal());
    random_mean +=
        percentile_error(pred, static_cast<std::size_t>(t) % pool.size(), pool);
  }
  random_mean /= 1000.0;
  c.expect(random_mean >= 0.45 && random_mean <= 0.55,
           "random-predictor mean " + std::to_string(random_mean));

  // Worst case: two-member pool, rival strictly closer.
  std::vector<std::vector<float>> two{{0.0f, 0.0f}, {5.0f, 0.0f}};
  c.expect(percentile_error(std::vector<float>{0.1f, 0.0f}, 1, two) == 1.0,
           "two-member worst case not 1.0");

  detail = c.detail;
  if (c.ok) detail = "random-predictor mean = " + std::to_string(random_mean);
  return c.ok;
}

// --------------------------------------------- criterion 6: retrieval --

bool criterion6(std::string& detail) {
  using namespace playcomm::eval;
  Check c;
  Rng rng(600);

  auto make_pool = [&](std::size_t n) {
    RetrievalPool pool;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<float> v(64);
      for (auto& x : v) x = static_cast<float>(rng.normal());
      pool.emplace_back("utterance " + std::to_string(i), std::move(v));
    }
    return pool;
  };

  {  // self-retrieval
    const RetrievalPool pool = make_pool(500);
    const auto res = retrieve_top_k(pool[123].second, pool, 5);
    c.expect(res.ranked[0].first == "utterance 123", "self-retrieval rank 1 wrong");
    c.expect(std::abs(res.ranked[0].second - 1.0) < 1e-6, "self cosine not 1");
  }

  for (std::size_t pool_size : {100u, 1000u, 10000u}) {
    const RetrievalPool pool = make_pool(pool_size);
    const int queries = pool_size == 10000 ? 20 : 15;  // 50 total
    for (int q = 0; q < queries; ++q) {
      std::vector<float> pred(64);
      for (auto& x : pred) x = static_cast<float>(rng.normal());
      const auto res = retrieve_top_k(pred, pool, 5);

      std::vector<std::pair<double, std::size_t>> scored;
      scored.reserve(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) {
        scored.emplace_back(
            text::cosine_similarity(pred, std::span<const float>(pool[i].second)),
            i);
      }
      std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first > b.first;
      });
      for (std::size_t i = 0; i < 5; ++i) {
        c.expect(res.ranked[i].first == pool[scored[i].second].first,
                 "pool " + std::to_string(pool_size) + " query " + std::to_string(q) +
                     " rank " + std::to_string(i) + " disagrees with full sort");
      }
    }
  }

  detail = c.detail;
  return c.ok;
}

// ------------------------------------ criterion 7: pipeline reproduction --

bool criterion7(std::string& detail) {
  Check c;
  TempDir dir("accept7");
  const auto corpus = testsupport::make_minicorpus(dir.str(), 777, 3, 100);

  const std::string dataset = dir.file("dataset.tsv");
  auto r = run_cli(g_cli, "ingest --frames " + corpus.frames_dir +
                              " --transcripts " + corpus.transcripts_dir +
                              " --fallback-embed --image-features " +
                              corpus.features_path + " --out " + dataset +
                              " --seed 7");
  c.expect(r.exit_code == 0, "ingest failed: " + r.err);
  c.expect(r.out.find("pairs: 300") != std::string::npos,
           "unexpected ingest summary: " + r.out);

  const std::string clusters = dir.file("clusters");
  r = run_cli(g_cli, "cluster --dataset " + dataset +
                         " --k-min 2 --k-max 6 --out " + clusters + " --seed 7");
  c.expect(r.exit_code == 0, "cluster failed: " + r.err);
  c.expect(r.out.find("selected K=") != std::string::npos, "no selected K line");

  const std::string whole = dir.file("whole.ckpt");
  r = run_cli(g_cli, "train --dataset " + dataset + " --input-size 32 --epochs 3 " +
                         "--out " + whole + " --seed 7");
  c.expect(r.exit_code == 0, "train failed: " + r.err);

  const std::string ckpt_dir = dir.file("ckpts");
  r = run_cli(g_cli, "train --dataset " + dataset + " --input-size 32 --epochs 3 " +
                         "--per-cluster " + clusters + ".tsv --out-dir " + ckpt_dir +
                         " --min-cluster-size 30 --seed 7");
  c.expect(r.exit_code == 0, "per-cluster train failed: " + r.err);

  const std::string report = dir.file("eval");
  r = run_cli(g_cli, "evaluate --dataset " + dataset + " --checkpoint " + whole +
                         " --cluster-report " + clusters + ".tsv --cluster-dir " +
                         ckpt_dir + " --out " + report);
  c.expect(r.exit_code == 0, "evaluate failed: " + r.err);

  // Table shape: header, one whole-model row, then per-cluster rows sorted
  // by training size descending.
  {
    std::ifstream table(report + ".txt");
    std::string line;
    std::getline(table, line);
    c.expect(line.find("Model") != std::string::npos &&
                 line.find("Training Set Size") != std::string::npos,
             "missing table header");
    std::vector<std::string> rows;
    while (std::getline(table, line)) {
      if (!line.empty()) rows.push_back(line);
    }
    c.expect(rows.size() >= 2, "expected whole-model and cluster rows");
    c.expect(!rows.empty() && rows[0].find("cnn") == 0, "first row is not the whole model");
    long last_size = std::numeric_limits<long>::max();
    for (std::size_t i = 1; i < rows.size(); ++i) {
      c.expect(rows[i].find("cluster-") != std::string::npos,
               "unexpected row: " + rows[i]);
      std::istringstream is(rows[i]);
      std::string label, a, b, d;
      long size = -1;
      is >> label >> a >> b >> d >> size;
      if (size < 0) {
        // "no test coverage" rows have a different column count
        continue;
      }
      c.expect(size <= last_size, "cluster rows not sorted by training size");
      last_size = size;
    }
  }

  const std::string frame = corpus.frames_dir + "/alpha/42.ppm";
  r = run_cli(g_cli, "commentate --dataset " + dataset + " --checkpoint " + whole +
                         " --image " + frame + " -k 5");
  c.expect(r.exit_code == 0, "commentate failed: " + r.err);
  {
    std::istringstream out(r.out);
    std::string line;
    std::vector<double> scores;
    while (std::getline(out, line)) {
      if (line.empty()) continue;
      const std::size_t tab = line.find('\t');
      c.expect(tab != std::string::npos, "commentate line missing TAB: " + line);
      if (tab != std::string::npos) {
        scores.push_back(std::stod(line.substr(0, tab)));
        c.expect(line.size() > tab + 1, "commentate line missing utterance");
      }
    }
    c.expect(scores.size() == 5, "expected 5 ranked lines, got " +
                                     std::to_string(scores.size()));
    for (std::size_t i = 1; i < scores.size(); ++i) {
      c.expect(scores[i - 1] >= scores[i], "commentate scores not descending");
    }
  }

  detail = c.detail;
  return c.ok;
}

// ----------------------------------------- criterion 8: format round trips --

bool criterion8(std::string& detail) {
  Check c;
  TempDir dir("accept8");
  const auto corpus = testsupport::make_minicorpus(dir.str(), 888, 1, 20);
  data::Dataset dataset = testsupport::ingest_corpus(corpus, 0, 15, 3, true);

  {  // dataset file
    const std::string p1 = dir.file("d1.tsv"), p2 = dir.file("d2.tsv");
    data::write_dataset(dataset, p1);
    const data::Dataset back = data::read_dataset(p1);
    c.expect(back == dataset, "dataset does not round trip structurally");
    data::write_dataset(back, p2);
    c.expect(testsupport::slurp_bytes(p1) == testsupport::slurp_bytes(p2),
             "dataset re-serialization differs");
  }

  {  // embedding-format file
    std::map<std::string, std::vector<float>> records;
    Rng rng(808);
    for (int i = 0; i < 10; ++i) {
      std::vector<float> v(32);
      for (auto& x : v) x = static_cast<float>(rng.normal());
      records["id" + std::to_string(i)] = std::move(v);
    }
    const std::string p1 = dir.file("v1.tsv"), p2 = dir.file("v2.tsv");
    text::write_id_vector_file(p1, records);
    const auto loaded = text::read_id_vector_file(p1, 0);
    c.expect(loaded.records == records, "vector file does not round trip");
    text::write_id_vector_file(p2, loaded.records);
    c.expect(testsupport::slurp_bytes(p1) == testsupport::slurp_bytes(p2),
             "vector file re-serialization differs");
  }

  {  // cluster report
    cluster::ClusterReport report;
    report.selected_k = 2;
    bool first = true;
    std::size_t i = 0;
    for (const auto& p : dataset.pairs) {
      if (p.split != data::Split::train) continue;
      const std::size_t cluster_id = (i < 2) ? i : i % 2;
      if (i < 2) report.medoid_frame_ids.push_back(p.frame_id);
      report.assignments[p.frame_id] = cluster_id;
      ++i;
      first = false;
    }
    c.expect(!first, "no training pairs");
    const std::string p1 = dir.file("c1.tsv"), p2 = dir.file("c2.tsv");
    cluster::write_cluster_report(report, p1);
    const auto back = cluster::read_cluster_report(p1);
    cluster::write_cluster_report(back, p2);
    c.expect(testsupport::slurp_bytes(p1) == testsupport::slurp_bytes(p2),
             "cluster report re-serialization differs");
  }

  {  // checkpoint + corruption diagnostics
    nn::ArchitectureConfig arch;
    arch.input_height = 16;
    arch.input_width = 16;
    arch.conv_filters = {4, 6, 6};
    arch.fc1_units = 16;
    arch.output_dim = 512;
    nn::Model<float> model(arch, 808);
    const std::string p1 = dir.file("m1.ckpt"), p2 = dir.file("m2.ckpt");
    nn::save_checkpoint(nn::checkpoint_from_model(model, {}), p1);
    nn::save_checkpoint(nn::load_checkpoint(p1), p2);
    const std::string bytes = testsupport::slurp_bytes(p1);
    c.expect(bytes == testsupport::slurp_bytes(p2),
             "checkpoint re-serialization differs");

    auto write_mutated = [&](const std::string& name, const std::string& data) {
      std::ofstream out(dir.file(name), std::ios::binary);
      out.write(data.data(), static_cast<std::streamsize>(data.size()));
      return dir.file(name);
    };
    auto expect_error = [&](const std::string& path, const std::string& needle,
                            const std::string& what) {
      try {
        nn::load_checkpoint(path);
        c.expect(false, what + ": no error raised");
      } catch (const InputError& e) {
        c.expect(std::string(e.what()).find(needle) != std::string::npos,
                 what + ": diagnostic '" + e.what() + "' lacks '" + needle + "'");
      }
    };
    expect_error(write_mutated("trunc.ckpt", bytes.substr(0, bytes.size() - 100)),
                 "truncated", "truncation");
    std::string bad_magic = bytes;
    bad_magic[0] = 'Z';
    expect_error(write_mutated("magic.ckpt", bad_magic), "bad magic", "magic");
    std::string bad_shape = bytes;
    bad_shape[48] = static_cast<char>(32);  // fc1_units field
    bad_shape[49] = 0;
    expect_error(write_mutated("shape.ckpt", bad_shape), "does not match architecture",
                 "shape mismatch");
  }

  detail = c.detail;
  return c.ok;
}

// --------------------------------- criterion 9: optional external dataset --

bool criterion9(std::string& detail, bool* skipped) {
  const char* root = std::getenv("PLAYCOMM_DATASET_DIR");
  if (root == nullptr) {
    *skipped = true;
    detail = "PLAYCOMM_DATASET_DIR not set";
    return true;
  }
  Check c;
  TempDir dir("accept9");
  const std::string dataset = dir.file("dataset.tsv");
  std::string cmd = std::string("ingest --frames ") + root + "/frames" +
                    " --transcripts " + root + "/transcripts" +
                    " --embeddings " + root + "/embeddings.tsv" +
                    " --out " + dataset + " --seed 7";
  auto r = run_cli(g_cli, cmd);
  c.expect(r.exit_code == 0, "ingest failed: " + r.err);
  c.expect(r.out.find("pairs: 4840") != std::string::npos &&
               r.out.find("train: 3600") != std::string::npos &&
               r.out.find("test: 1240") != std::string::npos,
           "counts differ from 4840/3600/1240: " + r.out);
  detail = c.detail;
  return c.ok;
}

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::string&)> run;
  double budget_seconds;  // 0 = no budget
};

}  // namespace

int main(int argc, char** argv) {
  g_cli = testsupport::cli_path_from_args(argc, argv);
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: acceptance --cli <path-to-playcomm>\n");
    return 1;
  }

  const std::vector<Criterion> criteria{
      {1, "gradient correctness (per-layer < 1e-6, full stack < 1e-4)", criterion1, 120},
      {2, "adam oracle to 1e-12", criterion2, 0},
      {3, "overfit sanity on 50 synthetic pairs", criterion3, 300},
      {4, "clustering oracles (PAM vs exhaustive; blob recovery)", criterion4, 0},
      {5, "metric calibration (oracle 0.0, random ~0.5, worst 1.0)", criterion5, 0},
      {6, "retrieval vs brute-force sort", criterion6, 0},
      {7, "pipeline structural reproduction", criterion7, 600},
      {8, "format round trips and corruption diagnostics", criterion8, 0},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (criterion.budget_seconds > 0 && seconds > criterion.budget_seconds) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("over budget: ") +
                std::to_string(seconds) + "s > " +
                std::to_string(criterion.budget_seconds) + "s";
    }
    std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL",
                criterion.id, criterion.name.c_str(), seconds,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }

  {  // criterion 9 is optional and never gates
    bool skipped = false;
    std::string detail;
    bool ok = true;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = criterion9(detail, &skipped);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion 9: external-data ingestion (optional, non-gating) "
                "(%.1fs)%s%s\n",
                skipped ? "SKIP" : (ok ? "PASS" : "FAIL"), seconds,
                detail.empty() ? "" : " -- ", detail.c_str());
  }

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all gating criteria passed\n");
  return 0;
}
