// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace elaspoof {

/// Base error for the whole toolkit. Every error carries a stable,
/// machine-greppable category string next to the human-readable detail;
/// the CLI prints them as `error: <category>: <detail>`.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& detail)
      : std::runtime_error(detail), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

class InvalidShapeError : public Error {
 public:
  explicit InvalidShapeError(const std::string& detail) : Error("invalid-shape", detail) {}
};

class ShapeMismatchError : public Error {
 public:
  explicit ShapeMismatchError(const std::string& detail) : Error("shape-mismatch", detail) {}
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& detail) : Error("invalid-argument", detail) {}
};

class InvalidConfigError : public Error {
 public:
  explicit InvalidConfigError(const std::string& detail) : Error("invalid-config", detail) {}
};

class InvalidLabelError : public Error {
 public:
  explicit InvalidLabelError(const std::string& detail) : Error("invalid-label", detail) {}
};

class IllegalStateError : public Error {
 public:
  explicit IllegalStateError(const std::string& detail) : Error("illegal-state", detail) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& detail) : Error("numeric", detail) {}
};

class DecodeError : public Error {
 public:
  explicit DecodeError(const std::string& detail) : Error("decode", detail) {}
};

class ProcessingError : public Error {
 public:
  explicit ProcessingError(const std::string& detail) : Error("processing", detail) {}
};

class ManifestError : public Error {
 public:
  explicit ManifestError(const std::string& detail) : Error("manifest", detail) {}
};

class InvalidDatasetError : public Error {
 public:
  explicit InvalidDatasetError(const std::string& detail) : Error("invalid-dataset", detail) {}
};

class CorruptCheckpointError : public Error {
 public:
  explicit CorruptCheckpointError(const std::string& detail) : Error("corrupt-checkpoint", detail) {}
};

class UnsupportedVersionError : public Error {
 public:
  explicit UnsupportedVersionError(const std::string& detail) : Error("unsupported-version", detail) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& detail) : Error("io", detail) {}
};

}  // namespace elaspoof
