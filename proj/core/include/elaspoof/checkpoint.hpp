// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elaspoof/ela.hpp"
#include "elaspoof/model.hpp"
#include "elaspoof/tensor.hpp"
#include "elaspoof/trainer.hpp"

namespace elaspoof {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor value;
};

/// Everything needed to reload a trained model: the architecture, the
/// training and preprocessing settings it was produced with (so eval/predict
/// can reproduce the input pipeline), the parameters, and optionally the
/// optimizer moments.
struct Checkpoint {
  ModelConfig model_config;
  TrainConfig train_config;
  ElaConfig ela_config;
  std::vector<NamedTensor> parameters;
  bool has_adam = false;
  std::uint64_t adam_t = 0;
  std::vector<NamedTensor> adam_m;
  std::vector<NamedTensor> adam_v;
};

/// On-disk layout, version 1 (all integers little-endian):
///   8-byte magic "ELASPOOF", u32 version,
///   u64-length-prefixed canonical-text model block,
///   u64-length-prefixed canonical-text training block (includes the ELA keys),
///   u64 parameter count, that many tensor records,
///   u8 adam flag; when set: u64 step count, then m records and v records.
/// A tensor record is: u64 name length + name, u32 rank, u64 dims,
/// little-endian IEEE-754 payload. Floats in the text blocks are printed with
/// 17 significant digits so every value round-trips bit-exactly.
std::vector<std::uint8_t> checkpoint_serialize(const Checkpoint& checkpoint);

/// Inverse of checkpoint_serialize. Bad magic, truncation, malformed blocks
/// or invalid stored configs raise CorruptCheckpointError; an unknown format
/// version raises UnsupportedVersionError.
Checkpoint checkpoint_deserialize(const std::vector<std::uint8_t>& bytes);

void checkpoint_save(const std::string& path, const Checkpoint& checkpoint);
Checkpoint checkpoint_load(const std::string& path);

/// Snapshot the network's current parameters (no optimizer state).
Checkpoint make_checkpoint(Network& network, const TrainConfig& train_config,
                           const ElaConfig& ela_config);

/// Rebuilds a network from the stored config and copies every parameter in,
/// verifying names and shapes record-by-record.
Network restore_network(const Checkpoint& checkpoint);

}  // namespace elaspoof
