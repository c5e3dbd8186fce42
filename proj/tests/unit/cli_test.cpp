// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests that spawn the installed binary, so they cover argument
// parsing, exit codes and the exact stdout/stderr contract.

#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "elaspoof/dataset.hpp"
#include "elaspoof/image.hpp"
#include "test_support.hpp"

using namespace elaspoof;
using elaspoof::testing::CorpusSpec;
using elaspoof::testing::ProcessResult;
using elaspoof::testing::ScratchDir;
using elaspoof::testing::make_corpus;
using elaspoof::testing::run_process;

namespace {

std::string cli() { return std::string(ELASPOOF_CLI_PATH); }

std::string quoted(const std::string& s) { return "'" + s + "'"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CorpusSpec tiny_corpus_spec() {
  CorpusSpec spec;
  spec.per_class = 6;
  spec.image_size = 32;
  spec.patch_size = 16;
  spec.seed = 77;
  return spec;
}

// Shared train invocation for the determinism cases.
std::string train_command(const std::string& manifest, const std::string& out,
                          const std::string& seed_arg) {
  return cli() + " train --manifest " + quoted(manifest) + " --out " + quoted(out) +
         " --input-size 32 --epochs 2 --batch-size 4 --val-split 0.25 " + seed_arg;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("--help exits zero and lists the subcommands") {
    ScratchDir scratch("elaspoof-cli");
    const ProcessResult r = run_process(cli() + " --help", scratch);
    CHECK(r.exit_code == 0);
    for (const char* name : {"prepare", "train", "eval", "predict", "ela"}) {
      CHECK(r.out.find(name) != std::string::npos);
    }
  }

  TEST_CASE("subcommand help documents the defaults") {
    ScratchDir scratch("elaspoof-cli");
    const ProcessResult r = run_process(cli() + " train --help", scratch);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("--lr") != std::string::npos);
    CHECK(r.out.find("0.001") != std::string::npos);
    CHECK(r.out.find("--epochs") != std::string::npos);
    CHECK(r.out.find("20") != std::string::npos);
    CHECK(r.out.find("binary cross-entropy") != std::string::npos);
    CHECK(r.out.find("ADAM") != std::string::npos);
  }

  TEST_CASE("bad invocations produce one error line on stderr") {
    ScratchDir scratch("elaspoof-cli");

    const ProcessResult none = run_process(cli(), scratch);
    CHECK(none.exit_code == 1);
    CHECK(none.err.rfind("error: invalid-argument:", 0) == 0);

    const ProcessResult unknown = run_process(cli() + " train --bogus-flag 1", scratch);
    CHECK(unknown.exit_code == 1);
    CHECK(unknown.err.rfind("error: invalid-argument:", 0) == 0);

    const ProcessResult missing = run_process(cli() + " predict", scratch);
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.rfind("error: invalid-argument:", 0) == 0);
  }

  TEST_CASE("ela writes a decodable map of the input's size") {
    ScratchDir scratch("elaspoof-cli");
    const std::string manifest = make_corpus(scratch, tiny_corpus_spec());
    const DatasetManifest m = load_manifest(manifest);
    const std::string out = scratch.file("map.png");

    const ProcessResult r = run_process(
        cli() + " ela --image " + quoted(m.records[0].path) + " --out " + quoted(out), scratch);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("ela map -> ") != std::string::npos);

    const RawImage map = decode_image(out);
    CHECK(map.height == 32);
    CHECK(map.width == 32);
  }

  TEST_CASE("ela validates quality and amplification") {
    ScratchDir scratch("elaspoof-cli");
    const std::string manifest = make_corpus(scratch, tiny_corpus_spec());
    const DatasetManifest m = load_manifest(manifest);
    const std::string image = quoted(m.records[0].path);
    const std::string out = quoted(scratch.file("map.png"));

    const ProcessResult quality = run_process(
        cli() + " ela --image " + image + " --out " + out + " --quality 0", scratch);
    CHECK(quality.exit_code == 1);
    CHECK(quality.err.rfind("error: invalid-", 0) == 0);

    const ProcessResult amp = run_process(
        cli() + " ela --image " + image + " --out " + out + " --amplify banana", scratch);
    CHECK(amp.exit_code == 1);
    CHECK(amp.err.rfind("error: invalid-argument:", 0) == 0);

    const ProcessResult fixed_amp = run_process(
        cli() + " ela --image " + image + " --out " + out + " --amplify 15", scratch);
    CHECK(fixed_amp.exit_code == 0);
  }

  TEST_CASE("prepare splits a manifest per class") {
    ScratchDir scratch("elaspoof-cli");
    const std::string manifest = make_corpus(scratch, tiny_corpus_spec());
    const std::string train_out = scratch.file("train.csv");
    const std::string test_out = scratch.file("test.csv");

    const ProcessResult r = run_process(
        cli() + " prepare --manifest " + quoted(manifest) + " --train-out " + quoted(train_out) +
            " --test-out " + quoted(test_out) + " --seed 1",
        scratch);
    CHECK(r.exit_code == 0);
    // round(0.7 * 6) = 4 per class to train, 2 per class to test.
    CHECK(r.out.find("train: 4 real, 4 fake") != std::string::npos);
    CHECK(r.out.find("test:  2 real, 2 fake") != std::string::npos);
    CHECK(r.out.find("noise screen: ") != std::string::npos);

    const DatasetManifest train_m = load_manifest(train_out);
    const DatasetManifest test_m = load_manifest(test_out);
    CHECK(train_m.records.size() == 8);
    CHECK(test_m.records.size() == 4);
    for (const ManifestRecord& tr : train_m.records) {
      for (const ManifestRecord& te : test_m.records) CHECK(tr.path != te.path);
    }
  }

  TEST_CASE("train, eval and predict complete the pipeline") {
    ScratchDir scratch("elaspoof-cli");
    const std::string manifest = make_corpus(scratch, tiny_corpus_spec());
    const std::string ckpt = scratch.file("model.ckpt");
    const std::string history = scratch.file("history.csv");

    const ProcessResult train = run_process(
        train_command(manifest, ckpt, "--seed 7") + " --history " + quoted(history), scratch);
    CHECK(train.exit_code == 0);
    CHECK(train.out.find("epoch 1/2") != std::string::npos);
    CHECK(train.out.find("epoch 2/2") != std::string::npos);
    CHECK(train.out.find("checkpoint -> ") != std::string::npos);
    CHECK(train.out.find("history -> ") != std::string::npos);

    std::istringstream history_lines(read_file(history));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(history_lines, line)) ++lines;
    CHECK(lines == 3);  // header + one row per epoch

    const ProcessResult eval = run_process(
        cli() + " eval --manifest " + quoted(manifest) + " --model " + quoted(ckpt), scratch);
    CHECK(eval.exit_code == 0);
    const std::size_t p_recall = eval.out.find("recall ");
    const std::size_t p_precision = eval.out.find("precision ");
    const std::size_t p_f1 = eval.out.find("f1 ");
    const std::size_t p_accuracy = eval.out.find("accuracy ");
    const std::size_t p_loss = eval.out.find("loss ");
    REQUIRE(p_recall != std::string::npos);
    REQUIRE(p_precision != std::string::npos);
    REQUIRE(p_f1 != std::string::npos);
    REQUIRE(p_accuracy != std::string::npos);
    REQUIRE(p_loss != std::string::npos);
    CHECK(p_recall < p_precision);
    CHECK(p_precision < p_f1);
    CHECK(p_f1 < p_accuracy);
    CHECK(p_accuracy < p_loss);

    const std::string report = scratch.file("report.json");
    const ProcessResult eval_json = run_process(
        cli() + " eval --manifest " + quoted(manifest) + " --model " + quoted(ckpt) +
            " --report " + quoted(report),
        scratch);
    CHECK(eval_json.exit_code == 0);
    const std::string body = read_file(report);
    CHECK(body.find("\"accuracy\"") != std::string::npos);

    const DatasetManifest m = load_manifest(manifest);
    const ProcessResult predict = run_process(
        cli() + " predict --image " + quoted(m.records[0].path) + " --model " + quoted(ckpt),
        scratch);
    CHECK(predict.exit_code == 0);
    CHECK(std::regex_match(predict.out,
                           std::regex(R"(Class: (Fake|Real) Confidence: \d{1,3}\.\d{2}\n)")));
  }

  TEST_CASE("training twice with the same seed gives identical checkpoints") {
    ScratchDir scratch("elaspoof-cli");
    const std::string manifest = make_corpus(scratch, tiny_corpus_spec());
    const std::string first = scratch.file("a.ckpt");
    const std::string second = scratch.file("b.ckpt");

    CHECK(run_process(train_command(manifest, first, "--seed 7"), scratch).exit_code == 0);
    CHECK(run_process(train_command(manifest, second, "--seed 7"), scratch).exit_code == 0);
    const std::string bytes_a = read_file(first);
    CHECK(!bytes_a.empty());
    CHECK(bytes_a == read_file(second));

    // The environment variable is the fallback for a missing --seed flag.
    const std::string via_env = scratch.file("c.ckpt");
    CHECK(run_process("ELASPOOF_SEED=7 " + train_command(manifest, via_env, ""), scratch)
              .exit_code == 0);
    CHECK(read_file(via_env) == bytes_a);

    // An explicit flag beats the environment.
    const std::string flag_wins = scratch.file("d.ckpt");
    CHECK(run_process("ELASPOOF_SEED=99 " + train_command(manifest, flag_wins, "--seed 7"),
                      scratch)
              .exit_code == 0);
    CHECK(read_file(flag_wins) == bytes_a);

    const ProcessResult junk =
        run_process("ELASPOOF_SEED=banana " + train_command(manifest, scratch.file("e.ckpt"), ""),
                    scratch);
    CHECK(junk.exit_code == 1);
    CHECK(junk.err.rfind("error: invalid-argument:", 0) == 0);
  }

  TEST_CASE("missing inputs map to categorized error lines") {
    ScratchDir scratch("elaspoof-cli");
    const std::string manifest = make_corpus(scratch, tiny_corpus_spec());

    const ProcessResult no_ckpt = run_process(
        cli() + " eval --manifest " + quoted(manifest) + " --model " +
            quoted(scratch.file("none.ckpt")),
        scratch);
    CHECK(no_ckpt.exit_code == 1);
    CHECK(no_ckpt.err.rfind("error: io:", 0) == 0);

    const std::string junk_image = scratch.file("junk.jpg");
    std::ofstream(junk_image) << "not an image";
    const std::string ckpt = scratch.file("model.ckpt");
    CHECK(run_process(train_command(manifest, ckpt, "--seed 1"), scratch).exit_code == 0);
    const ProcessResult bad_image = run_process(
        cli() + " predict --image " + quoted(junk_image) + " --model " + quoted(ckpt), scratch);
    CHECK(bad_image.exit_code == 1);
    CHECK(bad_image.err.rfind("error: decode:", 0) == 0);

    const ProcessResult no_manifest = run_process(
        cli() + " prepare --manifest " + quoted(scratch.file("none.csv")) + " --train-out " +
            quoted(scratch.file("t.csv")) + " --test-out " + quoted(scratch.file("u.csv")),
        scratch);
    CHECK(no_manifest.exit_code == 1);
    CHECK(no_manifest.err.rfind("error: io:", 0) == 0);
  }
}
