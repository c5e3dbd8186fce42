// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "elaspoof/errors.hpp"
#include "elaspoof/metrics.hpp"
#include "elaspoof/rng.hpp"
#include "test_support.hpp"

using namespace elaspoof;
using elaspoof::testing::ScratchDir;

TEST_SUITE("metrics") {
  TEST_CASE("confusion matrix of a hand-counted batch") {
    // fakes: .9 .8 .6 hit, .2 .4 missed; reals: .7 .55 false alarms,
    // .1 .3 .45 correctly passed.
    const std::vector<double> preds = {0.9, 0.8, 0.6, 0.2, 0.4, 0.7, 0.55, 0.1, 0.3, 0.45};
    const std::vector<int> labels = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    const ConfusionMatrix cm = confusion_from_predictions(preds, labels);
    CHECK(cm == ConfusionMatrix{3, 2, 2, 3});
    CHECK(cm.total() == 10);
  }

  TEST_CASE("a prediction exactly at the threshold counts as positive") {
    const ConfusionMatrix cm = confusion_from_predictions({0.5, 0.5}, {1, 0}, 0.5);
    CHECK(cm.tp == 1);
    CHECK(cm.fp == 1);
    CHECK(cm.fn == 0);
    CHECK(cm.tn == 0);
  }

  TEST_CASE("confusion input validation") {
    CHECK_THROWS_AS(confusion_from_predictions({}, {}), InvalidArgumentError);
    CHECK_THROWS_AS(confusion_from_predictions({0.5}, {0, 1}), InvalidArgumentError);
    CHECK_THROWS_AS(confusion_from_predictions({0.5}, {2}), InvalidLabelError);
    CHECK_THROWS_AS(confusion_from_predictions({0.5}, {-1}), InvalidLabelError);
  }

  TEST_CASE("raising the threshold never increases the positive counts") {
    Rng rng = Rng::for_stream(31, RngStream::kSynthetic);
    std::vector<double> preds;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
      preds.push_back(rng.next_double());
      labels.push_back(i % 2);
    }
    ConfusionMatrix prev = confusion_from_predictions(preds, labels, 0.0);
    for (double t : {0.2, 0.4, 0.6, 0.8, 1.01}) {
      const ConfusionMatrix cur = confusion_from_predictions(preds, labels, t);
      CHECK(cur.tp <= prev.tp);
      CHECK(cur.fp <= prev.fp);
      CHECK(cur.total() == 200);
      prev = cur;
    }
    // Beyond every probability nothing is flagged.
    CHECK(prev.tp == 0);
    CHECK(prev.fp == 0);
  }

  TEST_CASE("metrics of a hand-computed matrix") {
    const MetricsReport report = compute_metrics(ConfusionMatrix{3, 2, 1, 4});
    CHECK(report.accuracy == 0.7);
    CHECK(report.precision == 0.6);
    CHECK(report.recall == 0.75);
    CHECK(report.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK_FALSE(report.degenerate);
    CHECK(report.threshold == 0.5);
  }

  TEST_CASE("perfect and worthless classifiers") {
    const MetricsReport perfect = compute_metrics(ConfusionMatrix{5, 0, 0, 5});
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    CHECK_FALSE(perfect.degenerate);

    const MetricsReport inverted = compute_metrics(ConfusionMatrix{0, 5, 5, 0});
    CHECK(inverted.accuracy == 0.0);
    CHECK(inverted.precision == 0.0);
    CHECK(inverted.recall == 0.0);
    CHECK(inverted.f1 == 0.0);
    CHECK(inverted.degenerate);  // P + R hit zero
  }

  TEST_CASE("zero denominators report zero and set the degenerate flag") {
    // Nothing predicted positive: precision undefined.
    const MetricsReport no_pred = compute_metrics(ConfusionMatrix{0, 0, 3, 7});
    CHECK(no_pred.precision == 0.0);
    CHECK(no_pred.degenerate);

    // No actual positives: recall undefined.
    const MetricsReport no_pos = compute_metrics(ConfusionMatrix{0, 3, 0, 7});
    CHECK(no_pos.recall == 0.0);
    CHECK(no_pos.degenerate);

    CHECK_THROWS_AS(compute_metrics(ConfusionMatrix{0, 0, 0, 0}), InvalidArgumentError);
  }

  TEST_CASE("f1 is the harmonic mean") {
    CHECK(f1_score(1.0, 1.0) == 1.0);
    CHECK(f1_score(0.0, 0.0) == 0.0);
    CHECK(f1_score(0.5, 0.5) == 0.5);
    // Asymmetric pair: 2 * 0.97 * 0.83 / 1.80
    CHECK(f1_score(0.97, 0.83) == doctest::Approx(0.8945555555555555).epsilon(1e-12));
    CHECK(f1_score(0.97, 0.83) == f1_score(0.83, 0.97));
  }

  TEST_CASE("harmonic <= geometric <= arithmetic mean") {
    Rng rng = Rng::for_stream(32, RngStream::kSynthetic);
    for (int i = 0; i < 100; ++i) {
      const double p = rng.next_double(0.01, 1.0);
      const double r = rng.next_double(0.01, 1.0);
      const double harmonic = f1_score(p, r);
      const double geometric = std::sqrt(p * r);
      const double arithmetic = (p + r) / 2.0;
      CHECK(harmonic <= geometric + 1e-15);
      CHECK(geometric <= arithmetic + 1e-15);
    }
  }

  TEST_CASE("text report lists every field at six decimals") {
    const std::string text = report_to_text(compute_metrics(ConfusionMatrix{3, 2, 1, 4}, 0.5));
    CHECK(text.find("tp 3\n") != std::string::npos);
    CHECK(text.find("fp 2\n") != std::string::npos);
    CHECK(text.find("fn 1\n") != std::string::npos);
    CHECK(text.find("tn 4\n") != std::string::npos);
    CHECK(text.find("accuracy 0.700000\n") != std::string::npos);
    CHECK(text.find("precision 0.600000\n") != std::string::npos);
    CHECK(text.find("recall 0.750000\n") != std::string::npos);
    CHECK(text.find("f1 0.666667\n") != std::string::npos);
    CHECK(text.find("threshold 0.500000\n") != std::string::npos);
    CHECK(text.find("degenerate 0\n") != std::string::npos);
  }

  TEST_CASE("json report parses back with the same values") {
    const MetricsReport report = compute_metrics(ConfusionMatrix{3, 2, 1, 4}, 0.6);
    const nlohmann::json doc = nlohmann::json::parse(report_to_json(report));
    CHECK(doc.at("tp").get<std::size_t>() == 3);
    CHECK(doc.at("fp").get<std::size_t>() == 2);
    CHECK(doc.at("fn").get<std::size_t>() == 1);
    CHECK(doc.at("tn").get<std::size_t>() == 4);
    CHECK(doc.at("accuracy").get<double>() == report.accuracy);
    CHECK(doc.at("precision").get<double>() == report.precision);
    CHECK(doc.at("recall").get<double>() == report.recall);
    CHECK(doc.at("f1").get<double>() == report.f1);
    CHECK(doc.at("threshold").get<double>() == 0.6);
    CHECK(doc.at("degenerate").get<bool>() == false);
  }

  TEST_CASE("history csv has a header plus one row per epoch") {
    TrainHistory history;
    for (std::size_t e = 1; e <= 20; ++e) {
      history.push_back({e, 1.0 / static_cast<double>(e), 0.5, 0.25, 0.75});
    }
    const std::string csv = history_to_csv_string(history);

    std::istringstream lines(csv);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 21);
    CHECK(rows[0] == "epoch,train_loss,train_acc,val_loss,val_acc");
    CHECK(rows[1] == "1,1.000000,0.500000,0.250000,0.750000");
    CHECK(rows[2] == "2,0.500000,0.500000,0.250000,0.750000");
    CHECK(rows[20].substr(0, 3) == "20,");

    CHECK_THROWS_AS(history_to_csv_string({}), InvalidArgumentError);
  }

  TEST_CASE("history csv file writer") {
    ScratchDir scratch("elaspoof-metrics");
    TrainHistory history = {{1, 0.5, 0.5, 0.5, 0.5}};
    const std::string path = scratch.file("history.csv");
    history_to_csv(history, path);

    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == history_to_csv_string(history));

    CHECK_THROWS_AS(history_to_csv(history, scratch.file("no-such-dir/history.csv")), IoError);
  }
}
