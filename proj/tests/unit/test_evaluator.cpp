// Copyright 2026 The bitesense Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>

#include "bitesense/evaluator.hpp"
#include "bitesense/rng.hpp"
#include "test_util.hpp"

namespace bitesense {
namespace {

// Published eating/other confusion counts.
ConfusionMatrix published() {
  std::vector<std::size_t> truth;
  std::vector<std::size_t> pred;
  const auto add = [&](std::size_t t, std::size_t p, std::size_t n) {
    truth.insert(truth.end(), n, t);
    pred.insert(pred.end(), n, p);
  };
  add(0, 0, 5286);
  add(0, 1, 288);
  add(1, 0, 792);
  add(1, 1, 13587);
  return confusion(truth, pred, 2);
}

TEST(Confusion, HandCount) {
  const std::vector<std::size_t> t = {0, 0, 1};
  const std::vector<std::size_t> p = {0, 1, 1};
  const auto m = confusion(t, p, 2);
  EXPECT_EQ(m.at(0, 0), 1u);
  EXPECT_EQ(m.at(0, 1), 1u);
  EXPECT_EQ(m.at(1, 0), 0u);
  EXPECT_EQ(m.at(1, 1), 1u);
  EXPECT_EQ(m.total(), 3u);
}

TEST(Confusion, PerfectIsDiagonalAndErrors) {
  const std::vector<std::size_t> t = {0, 1, 2, 2, 1};
  const auto m = confusion(t, t, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) EXPECT_EQ(m.at(i, j), 0u);
    }
  }
  const auto c = ovr_counts(m, 1);
  EXPECT_EQ(c.fp, 0u);
  EXPECT_EQ(c.fn, 0u);
  const std::vector<std::size_t> shorter = {0};
  EXPECT_ERRC(confusion(t, shorter, 3), Errc::kLengthMismatch);
  EXPECT_ERRC(confusion(t, t, 2), Errc::kLabelOutOfRange);
}

TEST(Confusion, PublishedCounts) {
  const auto m = published();
  EXPECT_EQ(m.at(0, 0), 5286u);
  EXPECT_EQ(m.at(0, 1), 288u);
  EXPECT_EQ(m.at(1, 0), 792u);
  EXPECT_EQ(m.at(1, 1), 13587u);
  const auto eat = ovr_counts(m, 0);
  EXPECT_EQ(eat.tp, 5286u);
  EXPECT_EQ(eat.fn, 288u);
  EXPECT_EQ(eat.fp, 792u);
  EXPECT_EQ(eat.tn, 13587u);
  const auto other = ovr_counts(m, 1);
  EXPECT_EQ(other.tp, 13587u);
  EXPECT_EQ(other.fn, 792u);
  EXPECT_EQ(other.fp, 288u);
  EXPECT_EQ(other.tn, 5286u);
}

TEST(Metrics, PublishedCounts) {
  const auto r = metrics(published(), 0, 1.0, "eating");
  EXPECT_NEAR(*r.precision, 5286.0 / 6078.0, 1e-15);
  EXPECT_NEAR(*r.recall, 5286.0 / 5574.0, 1e-15);
  EXPECT_NEAR(*r.accuracy, 18873.0 / 19953.0, 1e-15);
  EXPECT_NEAR(*r.specificity, 13587.0 / 14379.0, 1e-15);
  EXPECT_NEAR(*r.precision, 0.8697, 5e-5);
  EXPECT_NEAR(*r.recall, 0.9483, 5e-5);
  EXPECT_NEAR(*r.accuracy, 0.9459, 5e-5);
  EXPECT_NEAR(*r.specificity, 0.9449, 5e-5);
}

TEST(FMeasure, Examples) {
  EXPECT_NEAR(*f_measure(0.89, 0.97, 1.0), 0.93, 0.005);
  EXPECT_NEAR(*f_measure(0.5, 1.0, 2.0), 5 * 0.5 / (4 * 1.0 + 0.5), 1e-15);
  for (double x : {0.1, 0.5, 0.77, 1.0}) EXPECT_NEAR(*f_measure(x, x, 1.0), x, 1e-15);
  EXPECT_FALSE(f_measure(std::nullopt, 0.5, 1.0).has_value());
}

TEST(Metrics, Properties) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionMatrix m(2);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) m.at(i, j) = 1 + rng.uniform_index(1000);
    }
    const auto pos = metrics(m, 0, 1.0);
    const auto neg = metrics(m, 1, 1.0);
    EXPECT_EQ(*pos.specificity, *neg.recall);
    EXPECT_EQ(*pos.precision,
              static_cast<double>(m.at(0, 0)) / static_cast<double>(m.at(0, 0) + m.at(1, 0)));
    EXPECT_LE(*pos.f_measure, std::max(*pos.precision, *pos.recall) + 1e-15);
    EXPECT_GE(*pos.f_measure, std::min(*pos.precision, *pos.recall) - 1e-15);
    EXPECT_NEAR(*f_measure(pos.precision, pos.recall, 1.0), *f_measure(pos.recall, pos.precision, 1.0),
                1e-15);
    // Swap the classes and the positive designation together.
    ConfusionMatrix swapped(2);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) swapped.at(1 - i, 1 - j) = m.at(i, j);
    }
    const auto s = metrics(swapped, 1, 1.0);
    EXPECT_EQ(*s.precision, *pos.precision);
    EXPECT_EQ(*s.recall, *pos.recall);
    EXPECT_EQ(*s.specificity, *pos.specificity);
    EXPECT_EQ(*s.accuracy, *pos.accuracy);
    EXPECT_EQ(*s.f_measure, *pos.f_measure);
  }
}

TEST(Metrics, UndefinedIsNotZero) {
  ConfusionMatrix m(2);
  m.at(1, 1) = 10;  // nothing predicted or labelled positive
  const auto r = metrics(m, 0, 1.0);
  EXPECT_FALSE(r.precision.has_value());
  EXPECT_FALSE(r.recall.has_value());
  EXPECT_FALSE(r.f_measure.has_value());
  EXPECT_DOUBLE_EQ(*r.specificity, 1.0);
  EXPECT_DOUBLE_EQ(*r.accuracy, 1.0);
  const auto text = render_report(evaluate(m, {"eating", "other"}));
  EXPECT_NE(text.find("n/a"), std::string::npos);
}

TEST(RenderReport, PublishedRowAndPurity) {
  EvalReport r;
  r.classes.push_back({"eating", 0.89, 0.97, 0.93, 0.96, 0.96});
  const auto text = render_report(r);
  EXPECT_NE(text.find("Precision"), std::string::npos);
  EXPECT_LT(text.find("Precision"), text.find("Recall"));
  EXPECT_LT(text.find("Recall"), text.find("F-Measure"));
  EXPECT_LT(text.find("F-Measure"), text.find("Specificity"));
  EXPECT_LT(text.find("Specificity"), text.find("Accuracy"));
  const auto row = text.substr(text.find("eating"));
  std::istringstream in(row);
  std::string name;
  std::vector<std::string> cells(5);
  in >> name >> cells[0] >> cells[1] >> cells[2] >> cells[3] >> cells[4];
  EXPECT_EQ(cells, (std::vector<std::string>{"0.89", "0.97", "0.93", "0.96", "0.96"}));
  EXPECT_EQ(render_report(r), text);
}

TEST(Collapse, FourToTwo) {
  ConfusionMatrix m(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) m.at(i, j) = 10 * i + j + 1;
  }
  const auto c = collapse(m, 0);
  EXPECT_EQ(c.total(), m.total());
  EXPECT_EQ(c.at(0, 0), m.at(0, 0));
  EXPECT_EQ(c.at(0, 1), m.at(0, 1) + m.at(0, 2) + m.at(0, 3));
  const auto a = ovr_counts(m, 0);
  const auto b = ovr_counts(c, 0);
  EXPECT_EQ(a.tp, b.tp);
  EXPECT_EQ(a.fp, b.fp);
  EXPECT_EQ(a.fn, b.fn);
  EXPECT_EQ(a.tn, b.tn);
}

TEST(Exports, CsvAndJson) {
  const auto m = published();
  EXPECT_EQ(confusion_csv(m, {"eating", "other"}),
            "true\\predicted,eating,other\neating,5286,288\nother,792,13587\n");
  const auto json = report_json(evaluate(m, {"eating", "other"}));
  EXPECT_NE(json.find("\"precision\""), std::string::npos);
  EXPECT_NE(json.find("5286"), std::string::npos);
}

}  // namespace
}  // namespace bitesense
