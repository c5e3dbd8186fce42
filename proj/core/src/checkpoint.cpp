// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "elaspoof/errors.hpp"

namespace elaspoof {
namespace {

constexpr char kMagic[8] = {'E', 'L', 'A', 'S', 'P', 'O', 'O', 'F'};
constexpr std::size_t kMaxNameLength = 1 << 16;
constexpr std::uint32_t kMaxRank = 8;

std::string canonical_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

// --- little-endian primitives ----------------------------------------------

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_bytes(std::vector<std::uint8_t>& out, const std::string& s) {
  out.insert(out.end(), s.begin(), s.end());
}

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1, "byte");
    return bytes_[pos_++];
  }

  std::uint32_t u32() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    need(8, "u64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string str(std::size_t n) {
    need(n, "string payload");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw CorruptCheckpointError(std::string("truncated checkpoint: expected ") + what +
                                   " at offset " + std::to_string(pos_));
    }
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

// --- canonical text blocks --------------------------------------------------

std::string model_config_text(const ModelConfig& config) {
  std::ostringstream out;
  out << "input_height " << config.input_height << '\n';
  out << "input_width " << config.input_width << '\n';
  out << "input_channels " << config.input_channels << '\n';
  out << "layers " << config.layers.size() << '\n';
  for (const LayerSpec& spec : config.layers) {
    if (const auto* conv = std::get_if<Conv2dSpec>(&spec)) {
      out << "layer conv2d " << conv->out_channels << ' ' << conv->kernel_h << ' '
          << conv->kernel_w << ' ' << conv->stride << '\n';
    } else if (const auto* pool = std::get_if<MaxPool2dSpec>(&spec)) {
      out << "layer maxpool2d " << pool->pool_h << ' ' << pool->pool_w << ' ' << pool->stride
          << '\n';
    } else if (const auto* drop = std::get_if<DropoutSpec>(&spec)) {
      out << "layer dropout " << canonical_double(drop->rate) << '\n';
    } else if (std::get_if<FlattenSpec>(&spec)) {
      out << "layer flatten\n";
    } else if (const auto* dense = std::get_if<DenseSpec>(&spec)) {
      out << "layer dense " << dense->units << '\n';
    } else if (const auto* act = std::get_if<ActivationSpec>(&spec)) {
      out << "layer activation "
          << (act->kind == ActivationKind::kRelu ? "relu" : "sigmoid") << '\n';
    }
  }
  return out.str();
}

std::string train_config_text(const TrainConfig& train, const ElaConfig& ela) {
  std::ostringstream out;
  out << "validation_split " << canonical_double(train.validation_split) << '\n';
  out << "shuffle " << (train.shuffle ? 1 : 0) << '\n';
  out << "epochs " << train.epochs << '\n';
  out << "batch_size " << train.batch_size << '\n';
  out << "learning_rate " << canonical_double(train.learning_rate) << '\n';
  out << "seed " << train.seed << '\n';
  out << "ela_jpeg_quality " << ela.jpeg_quality << '\n';
  out << "ela_amplification "
      << (ela.amplification ? canonical_double(*ela.amplification) : std::string("auto")) << '\n';
  out << "ela_target_size " << ela.target_size << '\n';
  return out.str();
}

[[noreturn]] void bad_block(const std::string& block, const std::string& detail) {
  throw CorruptCheckpointError("malformed " + block + " block: " + detail);
}

std::uint64_t parse_count(const std::string& block, const std::string& token) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(token, &used);
    if (used != token.size()) bad_block(block, "trailing characters in '" + token + "'");
    return v;
  } catch (const CorruptCheckpointError&) {
    throw;
  } catch (const std::exception&) {
    bad_block(block, "expected an integer, got '" + token + "'");
  }
}

double parse_double(const std::string& block, const std::string& token) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) bad_block(block, "trailing characters in '" + token + "'");
    return v;
  } catch (const CorruptCheckpointError&) {
    throw;
  } catch (const std::exception&) {
    bad_block(block, "expected a number, got '" + token + "'");
  }
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

ModelConfig parse_model_text(const std::string& text) {
  const std::string block = "model-config";
  ModelConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t declared_layers = 0;
  bool saw_layers_count = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> t = split_tokens(line);
    if (t[0] == "input_height" && t.size() == 2) {
      config.input_height = parse_count(block, t[1]);
    } else if (t[0] == "input_width" && t.size() == 2) {
      config.input_width = parse_count(block, t[1]);
    } else if (t[0] == "input_channels" && t.size() == 2) {
      config.input_channels = parse_count(block, t[1]);
    } else if (t[0] == "layers" && t.size() == 2) {
      declared_layers = parse_count(block, t[1]);
      saw_layers_count = true;
    } else if (t[0] == "layer" && t.size() >= 2) {
      if (t[1] == "conv2d" && t.size() == 6) {
        config.layers.push_back(Conv2dSpec{parse_count(block, t[2]), parse_count(block, t[3]),
                                           parse_count(block, t[4]), parse_count(block, t[5])});
      } else if (t[1] == "maxpool2d" && t.size() == 5) {
        config.layers.push_back(MaxPool2dSpec{parse_count(block, t[2]), parse_count(block, t[3]),
                                              parse_count(block, t[4])});
      } else if (t[1] == "dropout" && t.size() == 3) {
        config.layers.push_back(DropoutSpec{parse_double(block, t[2])});
      } else if (t[1] == "flatten" && t.size() == 2) {
        config.layers.push_back(FlattenSpec{});
      } else if (t[1] == "dense" && t.size() == 3) {
        config.layers.push_back(DenseSpec{parse_count(block, t[2])});
      } else if (t[1] == "activation" && t.size() == 3) {
        if (t[2] == "relu") {
          config.layers.push_back(ActivationSpec{ActivationKind::kRelu});
        } else if (t[2] == "sigmoid") {
          config.layers.push_back(ActivationSpec{ActivationKind::kSigmoid});
        } else {
          bad_block(block, "unknown activation '" + t[2] + "'");
        }
      } else {
        bad_block(block, "unrecognized layer line '" + line + "'");
      }
    } else {
      bad_block(block, "unrecognized line '" + line + "'");
    }
  }
  if (!saw_layers_count || declared_layers != config.layers.size()) {
    bad_block(block, "layer count mismatch");
  }
  try {
    for (const LayerSpec& spec : config.layers) validate_layer_spec(spec);
    propagate_shapes(config);
  } catch (const Error& e) {
    bad_block(block, e.what());
  }
  return config;
}

void parse_train_text(const std::string& text, TrainConfig& train, ElaConfig& ela) {
  const std::string block = "train-config";
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> t = split_tokens(line);
    if (t.size() != 2) bad_block(block, "unrecognized line '" + line + "'");
    if (t[0] == "validation_split") {
      train.validation_split = parse_double(block, t[1]);
    } else if (t[0] == "shuffle") {
      train.shuffle = parse_count(block, t[1]) != 0;
    } else if (t[0] == "epochs") {
      train.epochs = parse_count(block, t[1]);
    } else if (t[0] == "batch_size") {
      train.batch_size = parse_count(block, t[1]);
    } else if (t[0] == "learning_rate") {
      train.learning_rate = parse_double(block, t[1]);
    } else if (t[0] == "seed") {
      train.seed = parse_count(block, t[1]);
    } else if (t[0] == "ela_jpeg_quality") {
      ela.jpeg_quality = static_cast<int>(parse_count(block, t[1]));
    } else if (t[0] == "ela_amplification") {
      if (t[1] == "auto") {
        ela.amplification.reset();
      } else {
        ela.amplification = parse_double(block, t[1]);
      }
    } else if (t[0] == "ela_target_size") {
      ela.target_size = parse_count(block, t[1]);
    } else {
      bad_block(block, "unknown key '" + t[0] + "'");
    }
  }
  try {
    train.validate();
    ela.validate();
  } catch (const Error& e) {
    bad_block(block, e.what());
  }
}

// --- tensor records ---------------------------------------------------------

void put_record(std::vector<std::uint8_t>& out, const NamedTensor& record) {
  put_u64(out, record.name.size());
  put_bytes(out, record.name);
  put_u32(out, static_cast<std::uint32_t>(record.value.shape().size()));
  for (const std::size_t dim : record.value.shape()) put_u64(out, dim);
  for (std::size_t i = 0; i < record.value.size(); ++i) put_f64(out, record.value.data()[i]);
}

NamedTensor read_record(ByteReader& reader) {
  const std::uint64_t name_len = reader.u64();
  if (name_len == 0 || name_len > kMaxNameLength) {
    throw CorruptCheckpointError("implausible parameter name length " +
                                 std::to_string(name_len));
  }
  NamedTensor record;
  record.name = reader.str(name_len);
  const std::uint32_t rank = reader.u32();
  if (rank == 0 || rank > kMaxRank) {
    throw CorruptCheckpointError("implausible tensor rank " + std::to_string(rank) + " for '" +
                                 record.name + "'");
  }
  Shape shape(rank);
  for (std::uint32_t i = 0; i < rank; ++i) shape[i] = reader.u64();
  std::size_t count = 0;
  try {
    count = checked_element_count(shape);
  } catch (const Error& e) {
    throw CorruptCheckpointError(std::string("bad tensor shape for '") + record.name +
                                 "': " + e.what());
  }
  reader.need(count * sizeof(double), "tensor payload");
  record.value = Tensor::zeros(shape);
  for (std::size_t i = 0; i < count; ++i) record.value.data()[i] = reader.f64();
  return record;
}

}  // namespace

std::vector<std::uint8_t> checkpoint_serialize(const Checkpoint& checkpoint) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + sizeof(kMagic));
  put_u32(out, kCheckpointVersion);

  const std::string model_text = model_config_text(checkpoint.model_config);
  put_u64(out, model_text.size());
  put_bytes(out, model_text);

  const std::string train_text =
      train_config_text(checkpoint.train_config, checkpoint.ela_config);
  put_u64(out, train_text.size());
  put_bytes(out, train_text);

  put_u64(out, checkpoint.parameters.size());
  for (const NamedTensor& record : checkpoint.parameters) put_record(out, record);

  out.push_back(checkpoint.has_adam ? 1 : 0);
  if (checkpoint.has_adam) {
    if (checkpoint.adam_m.size() != checkpoint.parameters.size() ||
        checkpoint.adam_v.size() != checkpoint.parameters.size()) {
      throw InvalidArgumentError(
          "checkpoint adam moment lists must match the parameter list in length");
    }
    put_u64(out, checkpoint.adam_t);
    for (const NamedTensor& record : checkpoint.adam_m) put_record(out, record);
    for (const NamedTensor& record : checkpoint.adam_v) put_record(out, record);
  }
  return out;
}

Checkpoint checkpoint_deserialize(const std::vector<std::uint8_t>& bytes) {
  ByteReader reader(bytes);
  reader.need(sizeof(kMagic), "magic");
  const std::string magic = reader.str(sizeof(kMagic));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CorruptCheckpointError("bad magic: not a checkpoint file");
  }
  const std::uint32_t version = reader.u32();
  if (version != kCheckpointVersion) {
    throw UnsupportedVersionError("checkpoint format version " + std::to_string(version) +
                                  " is not supported (expected " +
                                  std::to_string(kCheckpointVersion) + ")");
  }

  Checkpoint checkpoint;
  const std::uint64_t model_len = reader.u64();
  reader.need(model_len, "model-config block");
  checkpoint.model_config = parse_model_text(reader.str(model_len));

  const std::uint64_t train_len = reader.u64();
  reader.need(train_len, "train-config block");
  parse_train_text(reader.str(train_len), checkpoint.train_config, checkpoint.ela_config);

  const std::uint64_t param_count = reader.u64();
  if (param_count > reader.remaining()) {
    // Every record takes well over one byte; cheap overflow-free guard
    // against a corrupt count driving a giant reserve.
    throw CorruptCheckpointError("implausible parameter record count " +
                                 std::to_string(param_count));
  }
  checkpoint.parameters.reserve(param_count);
  for (std::uint64_t i = 0; i < param_count; ++i) {
    checkpoint.parameters.push_back(read_record(reader));
  }

  checkpoint.has_adam = reader.u8() != 0;
  if (checkpoint.has_adam) {
    checkpoint.adam_t = reader.u64();
    checkpoint.adam_m.reserve(param_count);
    checkpoint.adam_v.reserve(param_count);
    for (std::uint64_t i = 0; i < param_count; ++i) {
      checkpoint.adam_m.push_back(read_record(reader));
    }
    for (std::uint64_t i = 0; i < param_count; ++i) {
      checkpoint.adam_v.push_back(read_record(reader));
    }
  }
  if (!reader.done()) {
    throw CorruptCheckpointError(std::to_string(reader.remaining()) +
                                 " trailing bytes after the checkpoint payload");
  }
  return checkpoint;
}

void checkpoint_save(const std::string& path, const Checkpoint& checkpoint) {
  const std::vector<std::uint8_t> bytes = checkpoint_serialize(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint to '" + path + "'");
}

Checkpoint checkpoint_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) throw IoError("failed reading checkpoint '" + path + "'");
  return checkpoint_deserialize(bytes);
}

Checkpoint make_checkpoint(Network& network, const TrainConfig& train_config,
                           const ElaConfig& ela_config) {
  Checkpoint checkpoint;
  checkpoint.model_config = network.config();
  checkpoint.train_config = train_config;
  checkpoint.ela_config = ela_config;
  for (const ParamView& p : network.parameters()) {
    checkpoint.parameters.push_back(NamedTensor{p.name, *p.value});
  }
  return checkpoint;
}

Network restore_network(const Checkpoint& checkpoint) {
  Network network(checkpoint.model_config);
  std::vector<ParamView> params = network.parameters();
  if (params.size() != checkpoint.parameters.size()) {
    throw CorruptCheckpointError("checkpoint stores " +
                                 std::to_string(checkpoint.parameters.size()) +
                                 " parameter tensors, model requires " +
                                 std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const NamedTensor& stored = checkpoint.parameters[i];
    if (stored.name != params[i].name) {
      throw CorruptCheckpointError("parameter " + std::to_string(i) + " is named '" +
                                   stored.name + "', expected '" + params[i].name + "'");
    }
    if (stored.value.shape() != params[i].value->shape()) {
      throw CorruptCheckpointError("parameter '" + stored.name + "' has shape " +
                                   shape_to_string(stored.value.shape()) + ", expected " +
                                   shape_to_string(params[i].value->shape()));
    }
    *params[i].value = stored.value;
  }
  return network;
}

}  // namespace elaspoof
