// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "elaspoof/trainer.hpp"

namespace elaspoof {

inline constexpr double kDefaultThreshold = 0.5;

/// Counts with fake as the positive class (a "positive" is a detected
/// attack). tp+fp+fn+tn always equals the number of evaluated samples.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = kDefaultThreshold;
  // Set when any metric's denominator was zero (that metric reports 0).
  bool degenerate = false;
};

/// Tallies predictions against labels; p >= threshold counts as positive
/// (boundary inclusive). Lengths must match and be nonzero
/// (InvalidArgumentError otherwise); labels must be 0/1 (InvalidLabelError).
ConfusionMatrix confusion_from_predictions(const std::vector<double>& predictions,
                                           const std::vector<int>& labels,
                                           double threshold = kDefaultThreshold);

/// accuracy = (tp+tn)/N, precision = tp/(tp+fp), recall = tp/(tp+fn),
/// f1 = 2PR/(P+R); zero-denominator metrics yield 0 and set the degenerate
/// flag. Empty matrix raises InvalidArgumentError.
MetricsReport compute_metrics(const ConfusionMatrix& confusion,
                              double threshold = kDefaultThreshold);

/// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(double precision, double recall);

/// Flat `key value` lines covering tp/fp/fn/tn, the four metrics, threshold
/// and the degenerate flag; floats at 6 decimal places.
std::string report_to_text(const MetricsReport& report);

/// The same fields as a JSON object.
std::string report_to_json(const MetricsReport& report);

/// CSV with header `epoch,train_loss,train_acc,val_loss,val_acc`, one row per
/// epoch, floats at 6 decimal places. Empty history raises
/// InvalidArgumentError.
std::string history_to_csv_string(const TrainHistory& history);

/// Writes history_to_csv_string to `path`; unwritable path raises IoError.
void history_to_csv(const TrainHistory& history, const std::string& path);

}  // namespace elaspoof
