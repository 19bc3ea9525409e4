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


#include "bitesense/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "bitesense/error.hpp"
#include "json.hpp"

namespace bitesense {
namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

ConfusionMatrix confusion(std::span<const std::size_t> truth,
                          std::span<const std::size_t> predicted, std::size_t classes) {
  if (truth.size() != predicted.size()) {
    throw Error(Errc::kLengthMismatch, std::to_string(truth.size()) + " true labels vs " +
                                           std::to_string(predicted.size()) + " predictions");
  }
  ConfusionMatrix m(classes);
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k] >= classes || predicted[k] >= classes) {
      throw Error(Errc::kLabelOutOfRange,
                  "label at position " + std::to_string(k) + " exceeds class count " +
                      std::to_string(classes));
    }
    ++m.at(truth[k], predicted[k]);
  }
  return m;
}

OvrCounts ovr_counts(const ConfusionMatrix& m, std::size_t positive) {
  if (positive >= m.classes()) {
    throw Error(Errc::kLabelOutOfRange, "positive class " + std::to_string(positive));
  }
  OvrCounts c;
  c.tp = m.at(positive, positive);
  for (std::size_t j = 0; j < m.classes(); ++j) {
    if (j == positive) continue;
    c.fn += m.at(positive, j);
    c.fp += m.at(j, positive);
  }
  c.tn = m.total() - c.tp - c.fn - c.fp;
  return c;
}

std::optional<double> f_measure(std::optional<double> precision,
                                std::optional<double> recall, double beta) {
  if (!precision || !recall) return std::nullopt;
  const double b2 = beta * beta;
  const double den = b2 * *recall + *precision;
  if (den == 0.0) return std::nullopt;
  return (1.0 + b2) * *recall * *precision / den;
}

ClassMetrics metrics(const OvrCounts& c, double beta, std::string name) {
  ClassMetrics r;
  r.name = std::move(name);
  r.accuracy = ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn);
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.recall = ratio(c.tp, c.tp + c.fn);
  r.f_measure = f_measure(r.precision, r.recall, beta);
  r.specificity = ratio(c.tn, c.tn + c.fp);
  return r;
}

ClassMetrics metrics(const ConfusionMatrix& m, std::size_t positive, double beta,
                     std::string name) {
  return metrics(ovr_counts(m, positive), beta, std::move(name));
}

EvalReport evaluate(const ConfusionMatrix& m, const std::vector<std::string>& names,
                    double beta) {
  if (names.size() != m.classes()) {
    throw Error(Errc::kLengthMismatch, "class names do not match matrix size");
  }
  EvalReport r;
  r.beta = beta;
  r.class_names = names;
  r.matrix = m;
  for (std::size_t c = 0; c < m.classes(); ++c) r.classes.push_back(metrics(m, c, beta, names[c]));
  return r;
}

ConfusionMatrix collapse(const ConfusionMatrix& m, std::size_t positive) {
  const OvrCounts c = ovr_counts(m, positive);
  ConfusionMatrix out(2);
  out.at(0, 0) = c.tp;
  out.at(0, 1) = c.fn;
  out.at(1, 0) = c.fp;
  out.at(1, 1) = c.tn;
  return out;
}

std::string render_report(const EvalReport& r) {
  static const char* kHeaders[] = {"Precision", "Recall", "F-Measure", "Specificity", "Accuracy"};
  std::size_t name_w = std::string("Activity").size();
  for (const auto& c : r.classes) name_w = std::max(name_w, c.name.size());
  name_w += 2;
  constexpr std::size_t kCol = 13;

  std::string out = pad_right("Activity", name_w);
  for (const char* h : kHeaders) out += pad_left(h, kCol);
  out += "\n";
  for (const auto& c : r.classes) {
    out += pad_right(c.name, name_w);
    for (const auto* v : {&c.precision, &c.recall, &c.f_measure, &c.specificity, &c.accuracy}) {
      out += pad_left(cell(*v), kCol);
    }
    out += "\n";
  }
  char beta[64];
  std::snprintf(beta, sizeof(beta), "beta = %g\n", r.beta);
  out += beta;

  if (!r.matrix.empty()) {
    const std::size_t n = r.matrix.classes();
    std::size_t w = 8;
    for (std::size_t i = 0; i < n; ++i) {
      w = std::max(w, (i < r.class_names.size() ? r.class_names[i].size() : 1) + 2);
      for (std::size_t j = 0; j < n; ++j) w = std::max(w, std::to_string(r.matrix.at(i, j)).size() + 2);
    }
    auto label = [&](std::size_t i) {
      return i < r.class_names.size() ? r.class_names[i] : std::to_string(i);
    };
    out += "\nConfusion matrix (rows = true label, columns = predicted label)\n";
    out += pad_right("", name_w);
    for (std::size_t j = 0; j < n; ++j) out += pad_left(label(j), w);
    out += "\n";
    for (std::size_t i = 0; i < n; ++i) {
      out += pad_right(label(i), name_w);
      for (std::size_t j = 0; j < n; ++j) out += pad_left(std::to_string(r.matrix.at(i, j)), w);
      out += "\n";
    }
  }
  return out;
}

std::string report_json(const EvalReport& r) {
  nlohmann::ordered_json doc;
  doc["beta"] = r.beta;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& c : r.classes) {
    rows.push_back({{"activity", c.name},
                    {"precision", opt_json(c.precision)},
                    {"recall", opt_json(c.recall)},
                    {"f_measure", opt_json(c.f_measure)},
                    {"specificity", opt_json(c.specificity)},
                    {"accuracy", opt_json(c.accuracy)}});
  }
  doc["classes"] = std::move(rows);
  if (!r.matrix.empty()) {
    auto grid = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.matrix.classes(); ++i) {
      auto row = nlohmann::ordered_json::array();
      for (std::size_t j = 0; j < r.matrix.classes(); ++j) row.push_back(r.matrix.at(i, j));
      grid.push_back(std::move(row));
    }
    doc["class_names"] = r.class_names;
    doc["confusion"] = std::move(grid);
  }
  return doc.dump(2) + "\n";
}

std::string confusion_csv(const ConfusionMatrix& m, const std::vector<std::string>& names) {
  std::string out = "true\\predicted";
  for (std::size_t j = 0; j < m.classes(); ++j) out += "," + names.at(j);
  out += "\n";
  for (std::size_t i = 0; i < m.classes(); ++i) {
    out += names.at(i);
    for (std::size_t j = 0; j < m.classes(); ++j) out += "," + std::to_string(m.at(i, j));
    out += "\n";
  }
  return out;
}

}  // namespace bitesense
