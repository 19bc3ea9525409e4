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


#ifndef BITESENSE_EVALUATOR_HPP_
#define BITESENSE_EVALUATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bitesense {

// counts(i, j) = number of examples with true class i predicted as class j.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes)
      : classes_(classes), counts_(classes * classes, 0) {}

  std::size_t classes() const { return classes_; }
  std::uint64_t& at(std::size_t truth, std::size_t predicted) {
    return counts_.at(truth * classes_ + predicted);
  }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts_.at(truth * classes_ + predicted);
  }
  std::uint64_t total() const;
  bool empty() const { return classes_ == 0; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_ = 0;
  std::vector<std::uint64_t> counts_;
};

struct OvrCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
};

// Undefined (0/0) metrics are nullopt, never 0.
struct ClassMetrics {
  std::string name;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_measure;
  std::optional<double> specificity;
  std::optional<double> accuracy;
};

struct EvalReport {
  double beta = 1.0;
  std::vector<ClassMetrics> classes;
  std::vector<std::string> class_names;  // labels for the matrix grid
  ConfusionMatrix matrix;                // may be empty for hand-fed reports
};

// Throws Error{kLengthMismatch | kLabelOutOfRange}.
ConfusionMatrix confusion(std::span<const std::size_t> truth,
                          std::span<const std::size_t> predicted, std::size_t classes);

// One-vs-rest reading of the matrix for `positive`.
// Throws Error{kLabelOutOfRange}.
OvrCounts ovr_counts(const ConfusionMatrix& m, std::size_t positive);

// Weighted harmonic mean (1 + b^2) P R / (b^2 R + P); nullopt if either
// input is undefined or the denominator is zero.
std::optional<double> f_measure(std::optional<double> precision,
                                std::optional<double> recall, double beta);

ClassMetrics metrics(const OvrCounts& c, double beta, std::string name = {});
ClassMetrics metrics(const ConfusionMatrix& m, std::size_t positive, double beta,
                     std::string name = {});

// One row per class (one-vs-rest).
EvalReport evaluate(const ConfusionMatrix& m, const std::vector<std::string>& names,
                    double beta = 1.0);

// 2x2 view: [positive, everything else].
ConfusionMatrix collapse(const ConfusionMatrix& m, std::size_t positive);

// Fixed-width table in the column order Precision, Recall, F-Measure,
// Specificity, Accuracy with two decimals (`n/a` for undefined), followed by
// the confusion grid when the report has one.
std::string render_report(const EvalReport& r);

// Same numbers as render_report, keyed, at full precision (null = undefined).
std::string report_json(const EvalReport& r);

// Header row of predicted-class names, then one row per true class.
std::string confusion_csv(const ConfusionMatrix& m, const std::vector<std::string>& names);

}  // namespace bitesense

#endif  // BITESENSE_EVALUATOR_HPP_
