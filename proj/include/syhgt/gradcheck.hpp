// Copyright 2026 The SyHGT Authors.
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

#ifndef SYHGT_GRADCHECK_HPP_
#define SYHGT_GRADCHECK_HPP_

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "syhgt/autodiff.hpp"

namespace syhgt {

struct NamedMatrix {
  std::string name;
  const Matrix* value = nullptr;
};

struct GradCheckReport {
  // Max over parameters of |g_tape - g_fd| / max(|g_tape|, |g_fd|), norms
  // taken over the whole parameter matrix. 0 when both gradients vanish.
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::vector<std::pair<std::string, double>> per_parameter;
  std::size_t evaluations = 0;
};

// Receives one leaf per parameter, in the order given, and returns a 1x1
// loss recorded on `tape`.
using LossBuilder = std::function<Var(Tape& tape, std::span<const Var> params)>;

// Compares tape gradients with central differences (f(x+eps) - f(x-eps)) /
// 2eps for every entry of every parameter. The tape is built once and
// replayed for each perturbation.
GradCheckReport check_gradients(std::span<const NamedMatrix> params,
                                const LossBuilder& build, double eps);

}  // namespace syhgt

#endif  // SYHGT_GRADCHECK_HPP_
