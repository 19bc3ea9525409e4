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


#include "bitesense/lstm/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace bitesense::lstm {

// Extended precision for the finite-difference side.
using Wide = long double;

template <typename T>
GradCheckResult grad_check(const ModelParams<T>& p, const Batch<T>& batch,
                           const Mat<T>& targets, double lambda, double epsilon,
                           const Gradients<T>* analytic) {
  Gradients<T> computed;
  if (analytic == nullptr) {
    const ForwardResult<T> fr = forward(batch, p);
    computed = backward(fr.cache, targets, p, lambda);
    analytic = &computed;
  }

  ModelParams<Wide> probe = p.template cast<Wide>();
  const Batch<Wide> batch_wide{batch.steps, batch.batch, batch.x.template cast<Wide>()};
  const Mat<Wide> targets_wide = targets.template cast<Wide>();
  auto eval = [&] {
    return loss(forward(batch_wide, probe).probs, targets_wide, probe, lambda);
  };

  GradCheckResult result;
  auto probe_tensors = probe.tensors();
  auto grad_tensors = analytic->tensors();
  for (std::size_t ti = 0; ti < probe_tensors.size(); ++ti) {
    auto& tensor = probe_tensors[ti];
    for (std::size_t j = 0; j < tensor.data.size(); ++j) {
      const Wide saved = tensor.data[j];
      tensor.data[j] = saved + static_cast<Wide>(epsilon);
      const Wide up = eval();
      tensor.data[j] = saved - static_cast<Wide>(epsilon);
      const Wide down = eval();
      tensor.data[j] = saved;

      const auto numeric = static_cast<double>((up - down) / (2 * static_cast<Wide>(epsilon)));
      const double a = static_cast<double>(grad_tensors[ti].data[j]);
      const double rel =
          std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-8);
      ++result.checked;
      if (rel > result.max_rel_error || result.worst_tensor.empty()) {
        result.max_rel_error = std::max(result.max_rel_error, rel);
        result.worst_tensor = std::string(tensor.name);
        result.worst_index = j;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

template GradCheckResult grad_check<float>(const ModelParams<float>&, const Batch<float>&,
                                           const Mat<float>&, double, double,
                                           const Gradients<float>*);
template GradCheckResult grad_check<double>(const ModelParams<double>&,
                                            const Batch<double>&, const Mat<double>&,
                                            double, double, const Gradients<double>*);

}  // namespace bitesense::lstm
