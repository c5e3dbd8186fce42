// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_set>
#include <utility>

#include "elaspoof/errors.hpp"
#include "elaspoof/image.hpp"
#include "elaspoof/rng.hpp"

namespace elaspoof {
namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

int parse_label(const std::string& token, const std::string& path, std::size_t line_no) {
  const std::string lowered = lowercase(token);
  if (lowered == "real") return kLabelReal;
  if (lowered == "fake") return kLabelFake;
  throw ManifestError(path + " line " + std::to_string(line_no) + ": unknown label '" + token +
                      "' (expected real or fake)");
}

// Stratified split over parallel label list; order within each side follows
// the seeded shuffle draw.
SplitIndices split_by_labels(const std::vector<int>& labels, double split_fraction,
                             std::uint64_t seed) {
  SplitIndices out;
  for (int label : {kLabelReal, kLabelFake}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) idx.push_back(i);
    }
    if (idx.empty()) continue;
    Rng rng = Rng::for_stream(seed, RngStream::kSplit, static_cast<std::uint64_t>(label));
    rng.shuffle(idx);
    const auto n_train = static_cast<std::size_t>(
        std::lround(split_fraction * static_cast<double>(idx.size())));
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + n_train);
    out.test.insert(out.test.end(), idx.begin() + n_train, idx.end());
  }
  return out;
}

void check_split_fraction(double split_fraction) {
  if (!(split_fraction >= 0.0 && split_fraction <= 1.0)) {
    throw InvalidArgumentError("split fraction must lie in [0,1], got " +
                               std::to_string(split_fraction));
  }
}

}  // namespace

const char* label_name(int label) {
  if (label == kLabelReal) return "real";
  if (label == kLabelFake) return "fake";
  throw InvalidLabelError("label must be 0 (real) or 1 (fake), got " + std::to_string(label));
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path + "'");

  DatasetManifest manifest;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) {
    throw ManifestError(path + ": empty file, expected header 'path,label'");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (trim(line) != "path,label") {
    throw ManifestError(path + " line 1: expected header 'path,label', got '" + line + "'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw ManifestError(path + " line " + std::to_string(line_no) +
                          ": expected 'path,label', got '" + line + "'");
    }
    const std::string record_path = trim(line.substr(0, comma));
    const std::string label_token = trim(line.substr(comma + 1));
    if (record_path.empty()) {
      throw ManifestError(path + " line " + std::to_string(line_no) + ": empty path");
    }
    if (!seen.insert(record_path).second) {
      throw ManifestError(path + " line " + std::to_string(line_no) + ": duplicate path '" +
                          record_path + "'");
    }
    manifest.records.push_back(
        ManifestRecord{record_path, parse_label(label_token, path, line_no)});
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "path,label\n";
  for (const ManifestRecord& record : manifest.records) {
    out << record.path << ',' << label_name(record.label) << '\n';
  }
  if (!out) throw IoError("failed writing manifest to '" + path + "'");
}

SplitIndices stratified_split(const DatasetManifest& manifest, double split_fraction,
                              std::uint64_t seed) {
  check_split_fraction(split_fraction);
  if (manifest.records.empty()) {
    throw InvalidDatasetError("stratified_split requires a nonempty manifest");
  }
  std::vector<int> labels;
  labels.reserve(manifest.records.size());
  for (const ManifestRecord& record : manifest.records) labels.push_back(record.label);
  return split_by_labels(labels, split_fraction, seed);
}

DatasetBuild build_dataset(const DatasetManifest& manifest, const ElaConfig& ela_config,
                           double split_fraction, std::uint64_t seed, bool shuffle) {
  check_split_fraction(split_fraction);
  ela_config.validate();
  if (manifest.records.empty()) {
    throw InvalidDatasetError("build_dataset requires a nonempty manifest");
  }

  DatasetBuild build;
  std::vector<Sample> samples;
  samples.reserve(manifest.records.size());
  for (const ManifestRecord& record : manifest.records) {
    try {
      const RawImage image = decode_image(record.path);
      const RawImage ela = ela_transform(image, ela_config);
      samples.push_back(Sample{resize_normalize(ela, ela_config.target_size), record.label,
                               record.path});
    } catch (const Error& e) {
      ++build.skipped;
      build.warnings.push_back("skipping " + record.path + ": " + e.what());
    }
  }

  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const Sample& sample : samples) labels.push_back(sample.label);
  for (int label : {kLabelReal, kLabelFake}) {
    if (std::count(labels.begin(), labels.end(), label) == 0) {
      throw InvalidDatasetError(std::string("class '") + label_name(label) +
                                "' has no decodable samples");
    }
  }

  const SplitIndices split = split_by_labels(labels, split_fraction, seed);
  build.train.reserve(split.train.size());
  build.test.reserve(split.test.size());
  for (const std::size_t i : split.train) build.train.push_back(samples[i]);
  for (const std::size_t i : split.test) build.test.push_back(samples[i]);

  if (shuffle) {
    Rng rng = Rng::for_stream(seed, RngStream::kShuffle);
    rng.shuffle(build.train);
  }
  return build;
}

}  // namespace elaspoof
