// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elaspoof/ela.hpp"
#include "elaspoof/tensor.hpp"

namespace elaspoof {

/// Binary labels: a "positive" is a detected attack.
inline constexpr int kLabelReal = 0;
inline constexpr int kLabelFake = 1;

/// One preprocessed, labeled image: features [target,target,3] in [0,1].
struct Sample {
  Tensor features;
  int label = kLabelReal;
  std::string source_path;
};

struct ManifestRecord {
  std::string path;
  int label = kLabelReal;
};

/// A labeled corpus described by CSV rows rather than a directory layout;
/// paths are used as written.
struct DatasetManifest {
  std::vector<ManifestRecord> records;
};

/// Parses a manifest CSV with header `path,label`. Labels are
/// case-insensitive {real, fake}. Missing header, unknown labels, duplicate
/// or empty paths raise ManifestError naming the offending line.
DatasetManifest load_manifest(const std::string& path);

/// Serializes records back to manifest CSV (header + one row per record).
void save_manifest(const DatasetManifest& manifest, const std::string& path);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified membership split over record indices: per class, indices are
/// shuffled with the split stream of `seed` and the first
/// round(split_fraction * class_count) go to train. Record order within each
/// side follows the shuffled draw.
SplitIndices stratified_split(const DatasetManifest& manifest, double split_fraction,
                              std::uint64_t seed);

struct DatasetBuild {
  std::vector<Sample> train;
  std::vector<Sample> test;
  std::size_t skipped = 0;               // records that failed to decode
  std::vector<std::string> warnings;     // one line per skipped record
};

/// Full ingestion: decode -> ELA -> resize/normalize each record, stratified
/// split at `split_fraction` over the decodable records, optional seeded
/// shuffle of the training list. Undecodable files are skipped with a
/// warning; a class left empty raises InvalidDatasetError.
DatasetBuild build_dataset(const DatasetManifest& manifest, const ElaConfig& ela_config,
                           double split_fraction, std::uint64_t seed, bool shuffle);

const char* label_name(int label);

}  // namespace elaspoof
