// CLI surface checks: flag contracts, exit codes, config precedence.
// Heavier end-to-end runs live in the acceptance suite.

#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <fstream>

#include "json.hpp"
#include "support/cli_runner.hpp"
#include "support/minicorpus.hpp"
#include "support/tempdir.hpp"

using nlohmann::json;
using testsupport::run_cli;
using testsupport::TempDir;

namespace {
std::string g_cli;
}

TEST_CASE("help and usage errors") {
  CHECK(run_cli(g_cli, "--help").exit_code == 0);
  CHECK(run_cli(g_cli, "ingest --help").exit_code == 0);
  CHECK(run_cli(g_cli, "").exit_code == 2);                    // subcommand required
  CHECK(run_cli(g_cli, "frobnicate").exit_code == 2);          // unknown subcommand
  CHECK(run_cli(g_cli, "train --no-such-flag").exit_code == 2);
  CHECK(run_cli(g_cli, "train").exit_code == 2);               // missing --dataset
}

TEST_CASE("ingest validates its inputs with exit code 2") {
  TempDir dir("cli-ingest");
  const auto r = run_cli(g_cli, "ingest --frames " + dir.str() +
                                    " --transcripts " + dir.file("missing.vtt") +
                                    " --out " + dir.file("d.tsv"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.err.find("missing.vtt") != std::string::npos);
}

TEST_CASE("cluster rejects a bad K range with exit code 2") {
  TempDir dir("cli-cluster");
  testsupport::MiniCorpus corpus = testsupport::make_minicorpus(dir.str(), 31, 1, 12);
  auto dataset = testsupport::ingest_corpus(corpus, 0, 10, 1, true);
  playcomm::data::write_dataset(dataset, dir.file("d.tsv"));
  const auto r = run_cli(g_cli, "cluster --dataset " + dir.file("d.tsv") +
                                    " --k-min 5 --k-max 3 --out " + dir.file("c"));
  CHECK(r.exit_code == 2);
}

TEST_CASE("evaluate and commentate reject missing checkpoints with exit code 2") {
  TempDir dir("cli-eval");
  testsupport::MiniCorpus corpus = testsupport::make_minicorpus(dir.str(), 32, 1, 12);
  auto dataset = testsupport::ingest_corpus(corpus, 0, 10, 1, false);
  playcomm::data::write_dataset(dataset, dir.file("d.tsv"));

  const auto r1 = run_cli(g_cli, "evaluate --dataset " + dir.file("d.tsv") +
                                     " --checkpoint " + dir.file("missing.ckpt"));
  CHECK(r1.exit_code == 2);

  const auto r2 = run_cli(g_cli, "commentate --dataset " + dir.file("d.tsv") +
                                     " --checkpoint " + dir.file("missing.ckpt") +
                                     " --image " + dir.file("missing.ppm"));
  CHECK(r2.exit_code == 2);
}

TEST_CASE("commentate rejects a non-image input with a decode diagnostic") {
  TempDir dir("cli-img");
  testsupport::MiniCorpus corpus = testsupport::make_minicorpus(dir.str(), 33, 1, 16);
  auto dataset = testsupport::ingest_corpus(corpus, 0, 12, 1, false);
  playcomm::data::write_dataset(dataset, dir.file("d.tsv"));

  // Train the tiniest possible model to get a valid checkpoint.
  const auto t = run_cli(g_cli, "train --dataset " + dir.file("d.tsv") +
                                    " --input-size 16 --epochs 1 --out " +
                                    dir.file("m.ckpt") + " --seed 4");
  REQUIRE(t.exit_code == 0);

  std::ofstream not_an_image(dir.file("fake.png"));
  not_an_image << "plain text";
  not_an_image.close();
  const auto r = run_cli(g_cli, "commentate --dataset " + dir.file("d.tsv") +
                                    " --checkpoint " + dir.file("m.ckpt") +
                                    " --image " + dir.file("fake.png"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("decode") != std::string::npos);
}

TEST_CASE("every command echoes a resolved-config line on stderr") {
  TempDir dir("cli-echo");
  const auto r = run_cli(g_cli, "ingest --frames " + dir.str() +
                                    " --transcripts x --out y");
  CHECK(r.err.find("resolved-config\t") != std::string::npos);
  const std::string line =
      r.err.substr(r.err.find("resolved-config\t") + 16);
  const json echoed = json::parse(line.substr(0, line.find('\n')));
  CHECK(echoed.at("command") == "ingest");
  CHECK(echoed.at("fps") == 1.0);
  CHECK(echoed.at("tolerance") == 5.0);
}

TEST_CASE("config precedence: flags beat the config file, which beats defaults") {
  TempDir dir("cli-config");
  {
    std::ofstream cfg(dir.file("cfg.json"));
    cfg << R"({"fps": 2.5, "tolerance": 9.0})";
  }
  const auto r = run_cli(g_cli, "ingest --config " + dir.file("cfg.json") +
                                    " --frames " + dir.str() +
                                    " --transcripts x --out y --tolerance 1.5");
  const std::string line =
      r.err.substr(r.err.find("resolved-config\t") + 16);
  const json echoed = json::parse(line.substr(0, line.find('\n')));
  CHECK(echoed.at("fps") == 2.5);        // from the config file
  CHECK(echoed.at("tolerance") == 1.5);  // flag wins
}

TEST_CASE("ingest notes the embedding source in its summary") {
  TempDir dir("cli-fb");
  testsupport::MiniCorpus corpus = testsupport::make_minicorpus(dir.str(), 35, 1, 12);
  const std::string base = "ingest --frames " + corpus.frames_dir +
                           " --transcripts " + corpus.transcripts_dir +
                           " --out " + dir.file("d.tsv");
  const auto none = run_cli(g_cli, base);
  REQUIRE(none.exit_code == 0);
  CHECK(none.out.find("embeddings: none") != std::string::npos);

  const auto fb = run_cli(g_cli, base + " --fallback-embed");
  REQUIRE(fb.exit_code == 0);
  CHECK(fb.out.find("embeddings: fallback") != std::string::npos);
}

TEST_CASE("same seed reproduces the checkpoint hash; the echoed config reproduces the run") {
  TempDir dir("cli-repro");
  testsupport::MiniCorpus corpus = testsupport::make_minicorpus(dir.str(), 36, 1, 16);
  auto dataset = testsupport::ingest_corpus(corpus, 0, 12, 2, false);
  playcomm::data::write_dataset(dataset, dir.file("d.tsv"));

  const std::string train_args = "train --dataset " + dir.file("d.tsv") +
                                 " --input-size 16 --epochs 2 --seed 11 --out ";
  const auto r1 = run_cli(g_cli, train_args + dir.file("a.ckpt"));
  const auto r2 = run_cli(g_cli, train_args + dir.file("b.ckpt"));
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);

  auto hash_of = [](const std::string& out) {
    const std::size_t pos = out.find("hash=");
    REQUIRE(pos != std::string::npos);
    return out.substr(pos + 5, 16);
  };
  CHECK(hash_of(r1.out) == hash_of(r2.out));

  // Replay from the echoed config alone (bar the output path).
  const std::size_t tag = r1.err.find("resolved-config\t");
  REQUIRE(tag != std::string::npos);
  std::string line = r1.err.substr(tag + 16);
  json cfg = json::parse(line.substr(0, line.find('\n')));
  cfg.erase("command");
  cfg["out"] = dir.file("c.ckpt");
  {
    std::ofstream f(dir.file("replay.json"));
    f << cfg.dump();
  }
  const auto r3 = run_cli(g_cli, "train --config " + dir.file("replay.json"));
  REQUIRE(r3.exit_code == 0);
  CHECK(hash_of(r3.out) == hash_of(r1.out));

  // Checkpoint files themselves are bit-identical.
  CHECK(testsupport::slurp_bytes(dir.file("a.ckpt")) ==
        testsupport::slurp_bytes(dir.file("c.ckpt")));
}

TEST_CASE("evaluate --json-lines emits machine-readable records") {
  TempDir dir("cli-jsonl");
  testsupport::MiniCorpus corpus = testsupport::make_minicorpus(dir.str(), 37, 1, 16);
  auto dataset = testsupport::ingest_corpus(corpus, 0, 12, 2, false);
  playcomm::data::write_dataset(dataset, dir.file("d.tsv"));
  const auto t = run_cli(g_cli, "train --dataset " + dir.file("d.tsv") +
                                    " --input-size 16 --epochs 1 --seed 3 --out " +
                                    dir.file("m.ckpt"));
  REQUIRE(t.exit_code == 0);

  const auto r = run_cli(g_cli, "evaluate --dataset " + dir.file("d.tsv") +
                                    " --checkpoint " + dir.file("m.ckpt") +
                                    " --json-lines --out " + dir.file("report"));
  REQUIRE(r.exit_code == 0);
  const std::size_t brace = r.out.find('{');
  REQUIRE(brace != std::string::npos);
  std::string line = r.out.substr(brace);
  const json record = json::parse(line.substr(0, line.find('\n')));
  CHECK(record.contains("mean_percentile_error"));
  CHECK(record.at("training_set_size") == 12);
  CHECK(testsupport::slurp_bytes(dir.file("report.jsonl")).find(
            "mean_percentile_error") != std::string::npos);
}

TEST_CASE("train rejects contradictory output flags") {
  TempDir dir("cli-train");
  testsupport::MiniCorpus corpus = testsupport::make_minicorpus(dir.str(), 34, 1, 12);
  auto dataset = testsupport::ingest_corpus(corpus, 0, 10, 1, false);
  playcomm::data::write_dataset(dataset, dir.file("d.tsv"));
  // --per-cluster without --out-dir
  const auto r = run_cli(g_cli, "train --dataset " + dir.file("d.tsv") +
                                    " --per-cluster " + dir.file("c.tsv"));
  CHECK(r.exit_code == 2);
}

int main(int argc, char** argv) {
  g_cli = testsupport::cli_path_from_args(argc, argv);
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli --cli <path-to-playcomm>\n");
    return 1;
  }
  doctest::Context ctx;
  ctx.applyCommandLine(1, argv);  // doctest flags unused; --cli is ours
  return ctx.run();
}
