// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include "elaspoof/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "elaspoof/dataset.hpp"
#include "elaspoof/errors.hpp"

namespace elaspoof {
namespace {

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

}  // namespace

ConfusionMatrix confusion_from_predictions(const std::vector<double>& predictions,
                                           const std::vector<int>& labels, double threshold) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw InvalidArgumentError(
        "confusion_from_predictions: predictions (" + std::to_string(predictions.size()) +
        ") and labels (" + std::to_string(labels.size()) + ") must be nonempty and equal-length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (labels[i] != kLabelReal && labels[i] != kLabelFake) {
      throw InvalidLabelError("label at index " + std::to_string(i) +
                              " must be 0 (real) or 1 (fake), got " + std::to_string(labels[i]));
    }
    const bool predicted_fake = predictions[i] >= threshold;
    const bool is_fake = labels[i] == kLabelFake;
    if (predicted_fake && is_fake) {
      ++cm.tp;
    } else if (predicted_fake && !is_fake) {
      ++cm.fp;
    } else if (!predicted_fake && is_fake) {
      ++cm.fn;
    } else {
      ++cm.tn;
    }
  }
  return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& confusion, double threshold) {
  const std::size_t n = confusion.total();
  if (n == 0) throw InvalidArgumentError("compute_metrics requires at least one sample");

  MetricsReport report;
  report.confusion = confusion;
  report.threshold = threshold;
  report.accuracy =
      static_cast<double>(confusion.tp + confusion.tn) / static_cast<double>(n);

  const std::size_t predicted_positive = confusion.tp + confusion.fp;
  const std::size_t actual_positive = confusion.tp + confusion.fn;
  if (predicted_positive == 0) {
    report.degenerate = true;
  } else {
    report.precision = static_cast<double>(confusion.tp) / static_cast<double>(predicted_positive);
  }
  if (actual_positive == 0) {
    report.degenerate = true;
  } else {
    report.recall = static_cast<double>(confusion.tp) / static_cast<double>(actual_positive);
  }
  if (report.precision + report.recall == 0.0) {
    report.degenerate = true;
  } else {
    report.f1 = f1_score(report.precision, report.recall);
  }
  return report;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  if (denom == 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

std::string report_to_text(const MetricsReport& report) {
  std::ostringstream out;
  out << "tp " << report.confusion.tp << '\n';
  out << "fp " << report.confusion.fp << '\n';
  out << "fn " << report.confusion.fn << '\n';
  out << "tn " << report.confusion.tn << '\n';
  out << "accuracy " << fixed6(report.accuracy) << '\n';
  out << "precision " << fixed6(report.precision) << '\n';
  out << "recall " << fixed6(report.recall) << '\n';
  out << "f1 " << fixed6(report.f1) << '\n';
  out << "threshold " << fixed6(report.threshold) << '\n';
  out << "degenerate " << (report.degenerate ? 1 : 0) << '\n';
  return out.str();
}

std::string report_to_json(const MetricsReport& report) {
  nlohmann::json doc;
  doc["tp"] = report.confusion.tp;
  doc["fp"] = report.confusion.fp;
  doc["fn"] = report.confusion.fn;
  doc["tn"] = report.confusion.tn;
  doc["accuracy"] = report.accuracy;
  doc["precision"] = report.precision;
  doc["recall"] = report.recall;
  doc["f1"] = report.f1;
  doc["threshold"] = report.threshold;
  doc["degenerate"] = report.degenerate;
  return doc.dump(2) + "\n";
}

std::string history_to_csv_string(const TrainHistory& history) {
  if (history.empty()) {
    throw InvalidArgumentError("history_to_csv requires a nonempty history");
  }
  std::ostringstream out;
  out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (const EpochRecord& record : history) {
    out << record.epoch << ',' << fixed6(record.train_loss) << ','
        << fixed6(record.train_accuracy) << ',' << fixed6(record.val_loss) << ','
        << fixed6(record.val_accuracy) << '\n';
  }
  return out.str();
}

void history_to_csv(const TrainHistory& history, const std::string& path) {
  const std::string csv = history_to_csv_string(history);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << csv;
  if (!out) throw IoError("failed writing history CSV to '" + path + "'");
}

}  // namespace elaspoof
