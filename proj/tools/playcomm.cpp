// playcomm: frame-to-commentary pipeline CLI.
//
// Subcommands: ingest, train, cluster, evaluate, commentate. Every command
// echoes its fully resolved configuration (flags > config file > defaults)
// as one "resolved-config" JSON line on stderr before running; feeding that
// JSON back via --config reproduces the run.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/validation.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "playcomm/cluster/report.hpp"
#include "playcomm/data/dataset.hpp"
#include "playcomm/errors.hpp"
#include "playcomm/eval/evaluate.hpp"
#include "playcomm/eval/retrieval.hpp"
#include "playcomm/hash.hpp"
#include "playcomm/pipeline.hpp"
#include "playcomm/text/fallback_embedder.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace playcomm;

namespace {

// Pre-scanned --config file; applied as defaults before flags are parsed.
json g_config;

json load_config_arg(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) throw InputError(std::string("cannot open config file ") + argv[i + 1]);
      json j;
      in >> j;
      if (!j.is_object()) throw InputError("config file must hold a JSON object");
      return j;
    }
  }
  return json::object();
}

template <typename T>
void config_default(const char* key, T& value) {
  if (g_config.contains(key)) value = g_config.at(key).get<T>();
}

void echo_config(const std::string& command, json resolved) {
  resolved["command"] = command;
  std::cerr << "resolved-config\t" << resolved.dump() << "\n";
}

std::uint64_t file_fnv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::uint64_t h = kFnvOffset;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h = fnv1a64_bytes(buf, static_cast<std::size_t>(in.gcount()), h);
    if (in.eof()) break;
  }
  return h;
}

struct VideoInput {
  std::string video_id;
  std::string frames_dir;
  std::string transcript_path;
};

// A frames dir either holds images directly (single video) or one
// subdirectory per video, with transcripts named <video_id>.* under the
// --transcripts directory.
std::vector<VideoInput> discover_videos(const std::string& frames_dir,
                                        const std::string& transcripts) {
  if (!fs::is_directory(frames_dir)) {
    throw InputError("ingest: frames dir not found: " + frames_dir);
  }
  std::vector<std::string> subdirs;
  for (const auto& e : fs::directory_iterator(frames_dir)) {
    if (e.is_directory()) subdirs.push_back(e.path().filename().string());
  }
  std::sort(subdirs.begin(), subdirs.end());

  std::vector<VideoInput> videos;
  if (subdirs.empty()) {
    if (!fs::is_regular_file(transcripts)) {
      throw InputError("ingest: cannot read transcript " + transcripts);
    }
    videos.push_back({fs::path(frames_dir).filename().string(), frames_dir,
                      transcripts});
    return videos;
  }

  if (!fs::is_directory(transcripts)) {
    throw InputError("ingest: --transcripts must name a directory when the "
                     "frames dir holds one subdirectory per video");
  }
  for (const auto& name : subdirs) {
    std::string transcript;
    for (const auto& e : fs::directory_iterator(transcripts)) {
      if (e.is_regular_file() && e.path().stem().string() == name) {
        transcript = e.path().string();
        break;
      }
    }
    if (transcript.empty()) {
      throw InputError("ingest: no transcript for video '" + name + "' under " +
                       transcripts);
    }
    videos.push_back({name, frames_dir + "/" + name, transcript});
  }
  return videos;
}

// ---------------------------------------------------------------- ingest --

struct IngestOpts {
  std::string frames_dir, transcripts, embeddings, image_features, out_path;
  bool fallback_embed = false;
  double fps = 1.0, tolerance = 5.0;
  std::int64_t train_count = -1;
  double train_fraction = -1.0;
  std::string split_mode = "random";
  std::uint64_t seed = 0;
  bool verbose = false;
  std::string config_path;
};

void run_ingest(const IngestOpts& o) {
  echo_config("ingest", json{{"frames", o.frames_dir},
                             {"transcripts", o.transcripts},
                             {"embeddings", o.embeddings},
                             {"fallback_embed", o.fallback_embed},
                             {"image_features", o.image_features},
                             {"out", o.out_path},
                             {"fps", o.fps},
                             {"tolerance", o.tolerance},
                             {"train_count", o.train_count},
                             {"train_fraction", o.train_fraction},
                             {"split_mode", o.split_mode},
                             {"seed", o.seed},
                             {"verbose", o.verbose}});
  if (o.train_count >= 0 && o.train_fraction >= 0.0) {
    throw InputError("ingest: --train-count and --train-fraction are exclusive");
  }

  data::Dataset dataset;
  std::size_t dropped = 0;
  for (const VideoInput& video : discover_videos(o.frames_dir, o.transcripts)) {
    const data::FrameSample sample = data::sample_frames(video.frames_dir, o.fps);
    if (o.verbose) {
      for (const auto& w : sample.warnings) std::cerr << "warning: " << w << "\n";
    }
    const auto cues = data::parse_transcript(video.transcript_path);
    if (sample.frames.empty()) {
      throw InputError("ingest: no frames found in " + video.frames_dir);
    }
    if (cues.empty()) {
      throw InputError("ingest: no cues in " + video.transcript_path);
    }
    data::AlignResult aligned =
        data::align(sample.frames, cues, o.tolerance, video.video_id);
    dropped += aligned.dropped;
    for (auto& p : aligned.pairs) dataset.pairs.push_back(std::move(p));
  }
  if (dataset.pairs.empty()) {
    throw InputError("ingest: no frame-comment pairs survived alignment");
  }

  std::size_t n_train;
  if (o.train_count >= 0) {
    n_train = static_cast<std::size_t>(o.train_count);
  } else if (o.train_fraction >= 0.0) {
    if (o.train_fraction > 1.0) {
      throw InputError("ingest: --train-fraction must be <= 1");
    }
    n_train = static_cast<std::size_t>(
        o.train_fraction * static_cast<double>(dataset.pairs.size()) + 0.5);
  } else {
    n_train = data::default_train_count(dataset.pairs.size());
  }
  data::split_dataset(dataset, n_train, o.seed,
                      o.split_mode == "random" ? data::SplitMode::random
                                               : data::SplitMode::chronological);

  std::string embedding_note = "none";
  if (!o.embeddings.empty()) {
    data::attach_embeddings(dataset, text::ingest_embeddings(o.embeddings));
    embedding_note = "external";
  } else if (o.fallback_embed) {
    text::FallbackEmbedder embedder({o.seed});
    std::map<std::string, text::SentenceEmbedding> by_utterance;
    for (const auto& p : dataset.pairs) {
      if (!by_utterance.contains(p.utterance_id)) {
        by_utterance.emplace(p.utterance_id, embedder.embed(p.utterance_text));
      }
    }
    data::attach_embeddings(dataset, by_utterance);
    embedding_note = "fallback";
  }

  if (!o.image_features.empty()) {
    data::attach_image_features(
        dataset, text::read_id_vector_file(o.image_features, 0).records);
  }

  data::write_dataset(dataset, o.out_path);
  std::cout << "pairs: " << dataset.pairs.size()
            << ", train: " << dataset.count(data::Split::train)
            << ", test: " << dataset.count(data::Split::test)
            << ", dropped: " << dropped
            << ", embeddings: " << embedding_note << "\n";
}

void setup_ingest(CLI::App* cmd) {
  auto o = std::make_shared<IngestOpts>();
  config_default("frames", o->frames_dir);
  config_default("transcripts", o->transcripts);
  config_default("embeddings", o->embeddings);
  config_default("image_features", o->image_features);
  config_default("out", o->out_path);
  config_default("fallback_embed", o->fallback_embed);
  config_default("fps", o->fps);
  config_default("tolerance", o->tolerance);
  config_default("train_count", o->train_count);
  config_default("train_fraction", o->train_fraction);
  config_default("split_mode", o->split_mode);
  config_default("seed", o->seed);
  config_default("verbose", o->verbose);

  auto* frames = cmd->add_option("--frames", o->frames_dir,
                                 "Frame images dir (or one subdir per video)");
  auto* transcripts = cmd->add_option(
      "--transcripts", o->transcripts, "Transcript file (or dir of <video>.vtt)");
  if (o->frames_dir.empty()) frames->required();
  if (o->transcripts.empty()) transcripts->required();
  cmd->add_option("--embeddings", o->embeddings,
                  "Sentence-embedding file (id<TAB>v1..v512)");
  cmd->add_flag("--fallback-embed", o->fallback_embed,
                "Embed utterances with the built-in hashing embedder");
  cmd->add_option("--image-features", o->image_features,
                  "Image-feature file (id<TAB>v1..vD)");
  auto* out = cmd->add_option("--out", o->out_path, "Output dataset file");
  if (o->out_path.empty()) out->required();
  cmd->add_option("--fps", o->fps, "Frame rate the images were sampled at");
  cmd->add_option("--tolerance", o->tolerance,
                  "Max seconds between a frame and its cue");
  cmd->add_option("--train-count", o->train_count,
                  "Training pairs (default: the 3600/4840 share)");
  cmd->add_option("--train-fraction", o->train_fraction,
                  "Training fraction (exclusive with --train-count)");
  cmd->add_option("--split-mode", o->split_mode, "random | chronological")
      ->check(CLI::IsMember({"random", "chronological"}));
  cmd->add_option("--seed", o->seed, "Master seed");
  cmd->add_flag("--verbose", o->verbose, "Print alignment warnings");
  cmd->add_option("--config", o->config_path, "JSON config file");
  cmd->callback([o]() { run_ingest(*o); });
}

// ----------------------------------------------------------------- train --

struct TrainOpts {
  std::string dataset_path, out_path, per_cluster_report, out_dir, loss_log;
  std::size_t input_size = 64, fc1_units = 1024;
  double dropout_keep = 0.9, negative_slope = 0.01;
  std::size_t epochs = 20, batch_size = 32, convergence_window = 3;
  double lr = 1e-3, convergence_rel_tol = 1e-3;
  std::size_t min_cluster_size = 50;
  std::uint64_t seed = 0;
  bool verbose = false;
  std::string config_path;
};

nn::ArchitectureConfig arch_from_opts(const TrainOpts& o) {
  nn::ArchitectureConfig arch;
  arch.input_height = o.input_size;
  arch.input_width = o.input_size;
  arch.fc1_units = o.fc1_units;
  arch.dropout_keep = o.dropout_keep;
  arch.negative_slope = o.negative_slope;
  arch.validate();
  return arch;
}

void run_train(const TrainOpts& o) {
  echo_config("train", json{{"dataset", o.dataset_path},
                            {"out", o.out_path},
                            {"per_cluster", o.per_cluster_report},
                            {"out_dir", o.out_dir},
                            {"loss_log", o.loss_log},
                            {"input_size", o.input_size},
                            {"fc1_units", o.fc1_units},
                            {"dropout_keep", o.dropout_keep},
                            {"negative_slope", o.negative_slope},
                            {"epochs", o.epochs},
                            {"batch_size", o.batch_size},
                            {"convergence_window", o.convergence_window},
                            {"convergence_rel_tol", o.convergence_rel_tol},
                            {"lr", o.lr},
                            {"min_cluster_size", o.min_cluster_size},
                            {"seed", o.seed},
                            {"verbose", o.verbose}});
  if (o.per_cluster_report.empty() && o.out_path.empty()) {
    throw InputError("train: --out (or --per-cluster with --out-dir) is required");
  }
  if (!o.per_cluster_report.empty() && o.out_dir.empty()) {
    throw InputError("train: --per-cluster needs --out-dir");
  }

  const data::Dataset dataset = data::read_dataset(o.dataset_path);
  const nn::ArchitectureConfig arch = arch_from_opts(o);
  nn::TrainConfig config;
  config.batch_size = o.batch_size;
  config.max_epochs = o.epochs;
  config.convergence_window = o.convergence_window;
  config.convergence_rel_tol = o.convergence_rel_tol;
  config.seed = o.seed;
  config.adam.learning_rate = o.lr;

  std::ofstream loss_out;
  if (!o.loss_log.empty()) {
    loss_out.open(o.loss_log, std::ios::trunc);
    if (!loss_out) throw InputError("train: cannot open loss log " + o.loss_log);
  }
  auto on_epoch = [&](const std::string& label, std::size_t epoch, double loss) {
    std::cout << label << " epoch " << epoch << " loss " << loss << "\n";
    if (loss_out) loss_out << label << '\t' << epoch << '\t' << loss << '\n';
  };

  if (o.per_cluster_report.empty()) {
    const pipeline::TrainOutcome outcome =
        pipeline::train_whole(dataset, arch, config, on_epoch);
    nn::save_checkpoint(outcome.checkpoint, o.out_path);
    std::cout << "checkpoint " << o.out_path
              << " hash=" << hex64(file_fnv(o.out_path))
              << " epochs=" << outcome.result.epochs_run
              << " final_loss=" << outcome.result.final_loss << "\n";
  } else {
    const auto report = cluster::read_cluster_report(o.per_cluster_report);
    fs::create_directories(o.out_dir);
    const auto outcomes = pipeline::train_per_cluster(
        dataset, report, arch, config, o.min_cluster_size, on_epoch);
    for (const auto& [cluster_id, outcome] : outcomes) {
      const std::string path =
          o.out_dir + "/cluster-" + std::to_string(cluster_id) + ".ckpt";
      nn::save_checkpoint(outcome.checkpoint, path);
      std::cout << "cluster " << cluster_id << " -> " << path
                << " hash=" << hex64(file_fnv(path))
                << " epochs=" << outcome.result.epochs_run
                << " final_loss=" << outcome.result.final_loss << "\n";
    }
  }
}

void setup_train(CLI::App* cmd) {
  auto o = std::make_shared<TrainOpts>();
  config_default("dataset", o->dataset_path);
  config_default("out", o->out_path);
  config_default("per_cluster", o->per_cluster_report);
  config_default("out_dir", o->out_dir);
  config_default("loss_log", o->loss_log);
  config_default("input_size", o->input_size);
  config_default("fc1_units", o->fc1_units);
  config_default("dropout_keep", o->dropout_keep);
  config_default("negative_slope", o->negative_slope);
  config_default("epochs", o->epochs);
  config_default("batch_size", o->batch_size);
  config_default("convergence_window", o->convergence_window);
  config_default("convergence_rel_tol", o->convergence_rel_tol);
  config_default("lr", o->lr);
  config_default("min_cluster_size", o->min_cluster_size);
  config_default("seed", o->seed);
  config_default("verbose", o->verbose);

  auto* ds = cmd->add_option("--dataset", o->dataset_path, "Dataset file from `ingest`");
  if (o->dataset_path.empty()) ds->required();
  cmd->add_option("--out", o->out_path, "Output checkpoint (whole-model training)");
  cmd->add_option("--per-cluster", o->per_cluster_report,
                  "Cluster report; train one model per qualifying cluster");
  cmd->add_option("--out-dir", o->out_dir, "Output dir for per-cluster checkpoints");
  cmd->add_option("--loss-log", o->loss_log, "Write per-epoch losses to this file");
  cmd->add_option("--input-size", o->input_size, "Frame edge length fed to the CNN");
  cmd->add_option("--fc1-units", o->fc1_units, "Width of the first dense layer");
  cmd->add_option("--dropout-keep", o->dropout_keep, "Dropout keep probability");
  cmd->add_option("--negative-slope", o->negative_slope, "Leaky ReLU negative slope");
  cmd->add_option("--epochs", o->epochs, "Max training epochs");
  cmd->add_option("--batch-size", o->batch_size, "Minibatch size");
  cmd->add_option("--convergence-window", o->convergence_window,
                  "Epoch window for the convergence stop");
  cmd->add_option("--convergence-rel-tol", o->convergence_rel_tol,
                  "Relative improvement below which training stops");
  cmd->add_option("--lr", o->lr, "Adam learning rate");
  cmd->add_option("--min-cluster-size", o->min_cluster_size,
                  "Smallest cluster that still gets its own model");
  cmd->add_option("--seed", o->seed, "Master seed");
  cmd->add_flag("--verbose", o->verbose, "Chatty progress output");
  cmd->add_option("--config", o->config_path, "JSON config file");
  cmd->callback([o]() { run_train(*o); });
}

// --------------------------------------------------------------- cluster --

struct ClusterOpts {
  std::string dataset_path, image_features, out_base;
  std::size_t k_min = 2, k_max = 10;
  double ratio_threshold = 1.15;
  std::uint64_t seed = 0;
  std::string config_path;
};

void run_cluster(const ClusterOpts& o) {
  echo_config("cluster", json{{"dataset", o.dataset_path},
                              {"image_features", o.image_features},
                              {"out", o.out_base},
                              {"k_min", o.k_min},
                              {"k_max", o.k_max},
                              {"ratio_threshold", o.ratio_threshold},
                              {"seed", o.seed}});
  if (o.k_min < 2 || o.k_min > o.k_max) {
    throw InputError("cluster: need 2 <= k-min <= k-max");
  }
  data::Dataset dataset = data::read_dataset(o.dataset_path);
  if (!o.image_features.empty()) {
    data::attach_image_features(
        dataset, text::read_id_vector_file(o.image_features, 0).records);
  }
  const std::size_t n_train = dataset.count(data::Split::train);
  const std::size_t k_cap = std::min(o.k_max, n_train);

  const cluster::ClusterReport report = cluster::cluster_training_split(
      dataset, o.k_min, k_cap, o.ratio_threshold, o.seed);

  for (const auto& [k, distortion] : report.distortion_per_k) {
    std::cout << "K=" << k << " distortion=" << distortion << "\n";
  }
  std::cout << "selected K=" << report.selected_k << "\n";

  cluster::write_cluster_report(report, o.out_base + ".tsv");
  const auto rows = cluster::medoid_report(report, dataset);
  const std::string table = cluster::format_medoid_table(rows);
  std::ofstream table_out(o.out_base + ".txt", std::ios::trunc);
  if (!table_out) throw InputError("cluster: cannot open " + o.out_base + ".txt");
  table_out << table;
  std::cout << table;
}

void setup_cluster(CLI::App* cmd) {
  auto o = std::make_shared<ClusterOpts>();
  config_default("dataset", o->dataset_path);
  config_default("image_features", o->image_features);
  config_default("out", o->out_base);
  config_default("k_min", o->k_min);
  config_default("k_max", o->k_max);
  config_default("ratio_threshold", o->ratio_threshold);
  config_default("seed", o->seed);

  auto* ds = cmd->add_option("--dataset", o->dataset_path, "Dataset file");
  if (o->dataset_path.empty()) ds->required();
  cmd->add_option("--image-features", o->image_features,
                  "Image-feature file (if the dataset does not embed them)");
  auto* out = cmd->add_option("--out", o->out_base, "Report base path (.tsv and .txt)");
  if (o->out_base.empty()) out->required();
  cmd->add_option("--k-min", o->k_min, "Smallest K to try");
  cmd->add_option("--k-max", o->k_max, "Largest K to try");
  cmd->add_option("--ratio-threshold", o->ratio_threshold,
                  "Distortion-ratio elbow threshold");
  cmd->add_option("--seed", o->seed, "Master seed");
  cmd->add_option("--config", o->config_path, "JSON config file");
  cmd->callback([o]() { run_cluster(*o); });
}

// -------------------------------------------------------------- evaluate --

struct EvaluateOpts {
  std::string dataset_path, cluster_report_path, cluster_dir, out_base;
  std::vector<std::string> checkpoints;
  std::string pool = "test";
  bool json_lines = false;
  std::string config_path;
};

void run_evaluate(const EvaluateOpts& o) {
  echo_config("evaluate", json{{"dataset", o.dataset_path},
                               {"checkpoint", o.checkpoints},
                               {"cluster_report", o.cluster_report_path},
                               {"cluster_dir", o.cluster_dir},
                               {"pool", o.pool},
                               {"out", o.out_base},
                               {"json_lines", o.json_lines}});
  if (o.checkpoints.empty() && o.cluster_report_path.empty()) {
    throw InputError("evaluate: need --checkpoint and/or --cluster-report");
  }
  if (!o.cluster_report_path.empty() && o.cluster_dir.empty()) {
    throw InputError("evaluate: --cluster-report needs --cluster-dir");
  }
  const data::Dataset dataset = data::read_dataset(o.dataset_path);
  const eval::PoolPolicy policy = o.pool == "test"    ? eval::PoolPolicy::test
                                  : o.pool == "train" ? eval::PoolPolicy::train
                                                      : eval::PoolPolicy::combined;

  std::vector<eval::EvaluationReport> rows;
  for (const auto& path : o.checkpoints) {
    rows.push_back(eval::evaluate(nn::load_checkpoint(path), dataset, policy));
  }
  if (!o.cluster_report_path.empty()) {
    const auto report = cluster::read_cluster_report(o.cluster_report_path);
    std::map<std::size_t, nn::ModelCheckpoint> per_cluster;
    for (std::size_t c = 0; c < report.medoid_frame_ids.size(); ++c) {
      const std::string path =
          o.cluster_dir + "/cluster-" + std::to_string(c) + ".ckpt";
      if (fs::is_regular_file(path)) {
        per_cluster.emplace(c, nn::load_checkpoint(path));
      }
    }
    if (per_cluster.empty()) {
      throw InputError("evaluate: no cluster-<id>.ckpt files under " + o.cluster_dir);
    }
    for (auto& row : eval::evaluate_clustered(per_cluster, dataset, report, policy)) {
      rows.push_back(std::move(row));
    }
  }

  std::cout << eval::format_report_table(rows);
  if (o.json_lines) std::cout << eval::report_json_lines(rows);
  if (!o.out_base.empty()) eval::write_report_files(rows, o.out_base);
}

void setup_evaluate(CLI::App* cmd) {
  auto o = std::make_shared<EvaluateOpts>();
  config_default("dataset", o->dataset_path);
  config_default("checkpoint", o->checkpoints);
  config_default("cluster_report", o->cluster_report_path);
  config_default("cluster_dir", o->cluster_dir);
  config_default("pool", o->pool);
  config_default("out", o->out_base);
  config_default("json_lines", o->json_lines);

  auto* ds = cmd->add_option("--dataset", o->dataset_path, "Dataset file");
  if (o->dataset_path.empty()) ds->required();
  cmd->add_option("--checkpoint", o->checkpoints,
                  "Whole-model checkpoint (repeatable)");
  cmd->add_option("--cluster-report", o->cluster_report_path,
                  "Cluster report for per-cluster evaluation");
  cmd->add_option("--cluster-dir", o->cluster_dir,
                  "Dir holding cluster-<id>.ckpt checkpoints");
  cmd->add_option("--pool", o->pool, "Candidate pool: test | train | combined")
      ->check(CLI::IsMember({"test", "train", "combined"}));
  cmd->add_option("--out", o->out_base, "Report base path (.txt and .jsonl)");
  cmd->add_flag("--json-lines", o->json_lines,
                "Print machine-readable records to stdout");
  cmd->add_option("--config", o->config_path, "JSON config file");
  cmd->callback([o]() { run_evaluate(*o); });
}

// ------------------------------------------------------------ commentate --

struct CommentateOpts {
  std::string checkpoint_path, image_path, dataset_path;
  std::size_t k = 5;
  std::string config_path;
};

void run_commentate(const CommentateOpts& o) {
  echo_config("commentate", json{{"checkpoint", o.checkpoint_path},
                                 {"image", o.image_path},
                                 {"dataset", o.dataset_path},
                                 {"k", o.k}});
  const data::Dataset dataset = data::read_dataset(o.dataset_path);
  const eval::RetrievalPool pool = eval::retrieval_pool(dataset, data::Split::train);
  const nn::ModelCheckpoint checkpoint = nn::load_checkpoint(o.checkpoint_path);
  const eval::RetrievalResult result =
      eval::commentate(checkpoint, o.image_path, pool, o.k);
  std::cout << eval::format_retrieval(result);
}

void setup_commentate(CLI::App* cmd) {
  auto o = std::make_shared<CommentateOpts>();
  config_default("checkpoint", o->checkpoint_path);
  config_default("image", o->image_path);
  config_default("dataset", o->dataset_path);
  config_default("k", o->k);

  auto* ck = cmd->add_option("--checkpoint", o->checkpoint_path, "Model checkpoint");
  if (o->checkpoint_path.empty()) ck->required();
  auto* img = cmd->add_option("--image", o->image_path, "Frame image to commentate");
  if (o->image_path.empty()) img->required();
  auto* ds = cmd->add_option("--dataset", o->dataset_path,
                             "Dataset supplying the retrieval pool");
  if (o->dataset_path.empty()) ds->required();
  cmd->add_option("-k,--top-k", o->k, "Number of nearest utterances to print");
  cmd->add_option("--config", o->config_path, "JSON config file");
  cmd->callback([o]() { run_commentate(*o); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Let's Play frame-to-commentary pipeline"};
  app.require_subcommand(1);

  try {
    g_config = load_config_arg(argc, argv);

    setup_ingest(app.add_subcommand("ingest", "Build a frame-comment dataset"));
    setup_train(app.add_subcommand("train", "Train the frame-to-embedding CNN"));
    setup_cluster(app.add_subcommand("cluster", "K-medoids over combined vectors"));
    setup_evaluate(app.add_subcommand("evaluate", "Average percentile error report"));
    setup_commentate(app.add_subcommand("commentate", "Top-k commentary for one frame"));

    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
