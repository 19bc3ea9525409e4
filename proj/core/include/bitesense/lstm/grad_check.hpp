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


#ifndef BITESENSE_LSTM_GRAD_CHECK_HPP_
#define BITESENSE_LSTM_GRAD_CHECK_HPP_

#include <cstddef>
#include <string>

#include "bitesense/lstm/network.hpp"

namespace bitesense::lstm {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// Compares analytic gradients against central differences
// (L(theta + eps) - L(theta - eps)) / (2 eps) for every parameter and reports
// max |a - n| / max(|a| + |n|, 1e-8).
//
// The numeric side always evaluates the loss in extended precision (long
// double) on the exactly widened parameters, so the difference quotient is
// not dominated by rounding noise in the loss, even for gradient entries
// near 1e-9. `analytic`
// overrides the gradients under test; by default they come from backward()
// in precision T. Cost is two forward passes per parameter.
template <typename T>
GradCheckResult grad_check(const ModelParams<T>& p, const Batch<T>& batch,
                           const Mat<T>& targets, double lambda, double epsilon = 1e-5,
                           const Gradients<T>* analytic = nullptr);

}  // namespace bitesense::lstm

#endif  // BITESENSE_LSTM_GRAD_CHECK_HPP_
