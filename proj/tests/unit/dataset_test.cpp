// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "elaspoof/dataset.hpp"
#include "elaspoof/errors.hpp"
#include "elaspoof/image.hpp"
#include "elaspoof/rng.hpp"
#include "test_support.hpp"

using namespace elaspoof;
using elaspoof::testing::ScratchDir;
using elaspoof::testing::make_texture;
using elaspoof::testing::paste_recompressed_patch;

namespace {

std::string write_text(const ScratchDir& scratch, const std::string& name,
                       const std::string& body) {
  const std::string path = scratch.file(name);
  std::ofstream(path, std::ios::binary) << body;
  return path;
}

// Writes per_class real and fake JPEGs to the scratch dir and returns an
// in-memory manifest (real block first, then fake).
DatasetManifest write_image_corpus(const ScratchDir& scratch, std::size_t per_class,
                                   std::size_t size, std::uint64_t seed) {
  DatasetManifest manifest;
  Rng rng = Rng::for_stream(seed, RngStream::kSynthetic);
  for (std::size_t i = 0; i < per_class; ++i) {
    const RawImage tex = make_texture(size, rng);
    const std::string path = scratch.file("real-" + std::to_string(i) + ".jpg");
    write_jpeg(tex, path, 92);
    manifest.records.push_back({path, kLabelReal});
  }
  for (std::size_t i = 0; i < per_class; ++i) {
    RawImage tex = make_texture(size, rng);
    paste_recompressed_patch(tex, size / 4, size / 4, size / 2, 60);
    const std::string path = scratch.file("fake-" + std::to_string(i) + ".jpg");
    write_jpeg(tex, path, 92);
    manifest.records.push_back({path, kLabelFake});
  }
  return manifest;
}

std::vector<int> side_labels(const DatasetManifest& manifest,
                             const std::vector<std::size_t>& indices) {
  std::vector<int> labels;
  for (const std::size_t i : indices) labels.push_back(manifest.records[i].label);
  return labels;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("label names") {
    CHECK(std::string(label_name(kLabelReal)) == "real");
    CHECK(std::string(label_name(kLabelFake)) == "fake");
    CHECK_THROWS_AS(label_name(2), InvalidLabelError);
    CHECK_THROWS_AS(label_name(-1), InvalidLabelError);
  }

  TEST_CASE("manifest parsing accepts messy but well-formed input") {
    ScratchDir scratch("elaspoof-ds");
    const std::string path = write_text(scratch, "m.csv",
                                        "path,label\r\n"
                                        "a.jpg,real\n"
                                        "\n"
                                        "  b.jpg , FAKE \r\n"
                                        "dir/with,comma.jpg,Real\n");
    const DatasetManifest m = load_manifest(path);
    REQUIRE(m.records.size() == 3);
    CHECK(m.records[0].path == "a.jpg");
    CHECK(m.records[0].label == kLabelReal);
    CHECK(m.records[1].path == "b.jpg");
    CHECK(m.records[1].label == kLabelFake);
    // Only the final comma separates path from label.
    CHECK(m.records[2].path == "dir/with,comma.jpg");
    CHECK(m.records[2].label == kLabelReal);
  }

  TEST_CASE("manifest errors name the offending line") {
    ScratchDir scratch("elaspoof-ds");

    auto expect_manifest_error = [&](const std::string& body, const std::string& needle) {
      const std::string path = write_text(scratch, "m.csv", body);
      try {
        load_manifest(path);
        FAIL("expected ManifestError for: " << needle);
      } catch (const ManifestError& e) {
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
      }
    };

    expect_manifest_error("", "empty file");
    expect_manifest_error("file,class\na.jpg,real\n", "line 1");
    expect_manifest_error("path,label\na.jpg,real\nb.jpg,genuine\n", "line 3");
    expect_manifest_error("path,label\na.jpg,real\nb.jpg,genuine\n", "genuine");
    expect_manifest_error("path,label\na.jpg,real\na.jpg,fake\n", "duplicate");
    expect_manifest_error("path,label\n,real\n", "empty path");
    expect_manifest_error("path,label\nno-comma-here\n", "line 2");

    CHECK_THROWS_AS(load_manifest(scratch.file("missing.csv")), IoError);
  }

  TEST_CASE("manifests round-trip through save and load") {
    ScratchDir scratch("elaspoof-ds");
    DatasetManifest original;
    original.records = {{"x/one.jpg", kLabelReal}, {"y/two.png", kLabelFake}};
    const std::string path = scratch.file("round.csv");
    save_manifest(original, path);

    const DatasetManifest reloaded = load_manifest(path);
    REQUIRE(reloaded.records.size() == 2);
    CHECK(reloaded.records[0].path == original.records[0].path);
    CHECK(reloaded.records[0].label == original.records[0].label);
    CHECK(reloaded.records[1].path == original.records[1].path);
    CHECK(reloaded.records[1].label == original.records[1].label);
  }

  TEST_CASE("stratified split keeps per-class proportions") {
    DatasetManifest manifest;
    for (int i = 0; i < 10; ++i) manifest.records.push_back({"r" + std::to_string(i), kLabelReal});
    for (int i = 0; i < 10; ++i) manifest.records.push_back({"f" + std::to_string(i), kLabelFake});

    const SplitIndices split = stratified_split(manifest, 0.7, 42);
    CHECK(split.train.size() == 14);
    CHECK(split.test.size() == 6);

    const std::vector<int> train_labels = side_labels(manifest, split.train);
    CHECK(std::count(train_labels.begin(), train_labels.end(), kLabelReal) == 7);
    CHECK(std::count(train_labels.begin(), train_labels.end(), kLabelFake) == 7);
    const std::vector<int> test_labels = side_labels(manifest, split.test);
    CHECK(std::count(test_labels.begin(), test_labels.end(), kLabelReal) == 3);
    CHECK(std::count(test_labels.begin(), test_labels.end(), kLabelFake) == 3);

    // Disjoint and complete.
    std::set<std::size_t> all(split.train.begin(), split.train.end());
    all.insert(split.test.begin(), split.test.end());
    CHECK(all.size() == 20);
    CHECK(*all.rbegin() == 19);
  }

  TEST_CASE("split extremes send everything to one side") {
    DatasetManifest manifest;
    for (int i = 0; i < 4; ++i) manifest.records.push_back({"r" + std::to_string(i), kLabelReal});
    for (int i = 0; i < 4; ++i) manifest.records.push_back({"f" + std::to_string(i), kLabelFake});

    CHECK(stratified_split(manifest, 1.0, 1).train.size() == 8);
    CHECK(stratified_split(manifest, 1.0, 1).test.empty());
    CHECK(stratified_split(manifest, 0.0, 1).train.empty());
    CHECK(stratified_split(manifest, 0.0, 1).test.size() == 8);
  }

  TEST_CASE("splits are seeded and the order follows the draw") {
    DatasetManifest manifest;
    for (int i = 0; i < 8; ++i) manifest.records.push_back({"r" + std::to_string(i), kLabelReal});
    for (int i = 0; i < 8; ++i) manifest.records.push_back({"f" + std::to_string(i), kLabelFake});

    const SplitIndices a = stratified_split(manifest, 0.5, 7);
    const SplitIndices b = stratified_split(manifest, 0.5, 7);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);

    bool any_membership_diff = false;
    bool any_unsorted = false;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const SplitIndices other = stratified_split(manifest, 0.5, seed);
      if (other.train != a.train) any_membership_diff = true;
      if (!std::is_sorted(other.train.begin(), other.train.end())) any_unsorted = true;
    }
    CHECK(any_membership_diff);
    CHECK(any_unsorted);
  }

  TEST_CASE("split input validation") {
    CHECK_THROWS_AS(stratified_split(DatasetManifest{}, 0.5, 0), InvalidDatasetError);
    DatasetManifest one;
    one.records.push_back({"a", kLabelReal});
    CHECK_THROWS_AS(stratified_split(one, 1.5, 0), InvalidArgumentError);
    CHECK_THROWS_AS(stratified_split(one, -0.1, 0), InvalidArgumentError);
  }

  TEST_CASE("build_dataset ingests, labels and splits real image files") {
    ScratchDir scratch("elaspoof-ds");
    const DatasetManifest manifest = write_image_corpus(scratch, 3, 32, 51);

    ElaConfig ela;
    ela.target_size = 16;
    const DatasetBuild build = build_dataset(manifest, ela, 0.5, 3, /*shuffle=*/false);

    // round(0.5 * 3) = 2 of each class to train.
    CHECK(build.train.size() == 4);
    CHECK(build.test.size() == 2);
    CHECK(build.skipped == 0);
    CHECK(build.warnings.empty());

    for (const Sample& sample : build.train) {
      REQUIRE(sample.features.shape() == Shape{16, 16, 3});
      CHECK_FALSE(sample.source_path.empty());
      for (std::size_t i = 0; i < sample.features.size(); ++i) {
        CHECK(sample.features[i] >= 0.0);
        CHECK(sample.features[i] <= 1.0);
      }
      // The stored label matches the file the sample came from.
      const bool is_fake_file = sample.source_path.find("fake-") != std::string::npos;
      CHECK(sample.label == (is_fake_file ? kLabelFake : kLabelReal));
    }
  }

  TEST_CASE("undecodable records are skipped with a warning") {
    ScratchDir scratch("elaspoof-ds");
    DatasetManifest manifest = write_image_corpus(scratch, 2, 32, 52);
    manifest.records.push_back({scratch.file("nope.jpg"), kLabelReal});
    manifest.records.push_back({write_text(scratch, "junk.jpg", "not an image"), kLabelFake});

    ElaConfig ela;
    ela.target_size = 8;
    const DatasetBuild build = build_dataset(manifest, ela, 1.0, 0, false);
    CHECK(build.skipped == 2);
    REQUIRE(build.warnings.size() == 2);
    CHECK(build.warnings[0].find("nope.jpg") != std::string::npos);
    CHECK(build.warnings[1].find("junk.jpg") != std::string::npos);
    CHECK(build.train.size() == 4);  // the decodable ones all survive
  }

  TEST_CASE("a class with no decodable samples fails the build") {
    ScratchDir scratch("elaspoof-ds");
    DatasetManifest manifest = write_image_corpus(scratch, 2, 32, 53);
    // Replace every fake with an unreadable path.
    for (ManifestRecord& record : manifest.records) {
      if (record.label == kLabelFake) record.path = scratch.file("gone.jpg");
    }
    manifest.records.resize(3);  // two reals + one broken fake keeps paths unique

    ElaConfig ela;
    ela.target_size = 8;
    try {
      build_dataset(manifest, ela, 1.0, 0, false);
      FAIL("expected InvalidDatasetError");
    } catch (const InvalidDatasetError& e) {
      CHECK(std::string(e.what()).find("fake") != std::string::npos);
    }
  }

  TEST_CASE("training-side shuffle is seeded and optional") {
    ScratchDir scratch("elaspoof-ds");
    const DatasetManifest manifest = write_image_corpus(scratch, 4, 32, 54);
    ElaConfig ela;
    ela.target_size = 8;

    auto paths_of = [](const std::vector<Sample>& samples) {
      std::vector<std::string> out;
      for (const Sample& s : samples) out.push_back(s.source_path);
      return out;
    };

    const DatasetBuild plain = build_dataset(manifest, ela, 1.0, 9, false);
    const DatasetBuild shuffled = build_dataset(manifest, ela, 1.0, 9, true);
    const DatasetBuild again = build_dataset(manifest, ela, 1.0, 9, true);

    CHECK(paths_of(shuffled.train) == paths_of(again.train));
    CHECK(paths_of(shuffled.train) != paths_of(plain.train));

    std::vector<std::string> sorted_plain = paths_of(plain.train);
    std::vector<std::string> sorted_shuffled = paths_of(shuffled.train);
    std::sort(sorted_plain.begin(), sorted_plain.end());
    std::sort(sorted_shuffled.begin(), sorted_shuffled.end());
    CHECK(sorted_plain == sorted_shuffled);  // same membership, different order
  }

  TEST_CASE("build validates its inputs") {
    ElaConfig ela;
    CHECK_THROWS_AS(build_dataset(DatasetManifest{}, ela, 0.5, 0, false), InvalidDatasetError);

    DatasetManifest one;
    one.records.push_back({"a.jpg", kLabelReal});
    CHECK_THROWS_AS(build_dataset(one, ela, 2.0, 0, false), InvalidArgumentError);

    ElaConfig bad;
    bad.jpeg_quality = 0;
    CHECK_THROWS_AS(build_dataset(one, bad, 0.5, 0, false), InvalidConfigError);
  }
}
