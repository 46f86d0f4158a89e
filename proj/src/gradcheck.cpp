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

#include "syhgt/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "syhgt/error.hpp"

namespace syhgt {

GradCheckReport check_gradients(std::span<const NamedMatrix> params,
                                const LossBuilder& build, double eps) {
  if (!(eps > 0.0)) throw ContractError("finite-difference step must be > 0");
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (const auto& p : params) leaves.push_back(tape.leaf(*p.value));
  const Var loss = build(tape, leaves);
  tape.backward(loss);

  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Matrix analytic = tape.grad(leaves[k]);
    Matrix numeric(analytic.rows(), analytic.cols());
    Matrix probe = *params[k].value;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const double x = probe[i];
      probe[i] = x + eps;
      tape.set_value(leaves[k], probe);
      tape.replay();
      const double up = tape.value(loss)[0];
      probe[i] = x - eps;
      tape.set_value(leaves[k], probe);
      tape.replay();
      const double down = tape.value(loss)[0];
      probe[i] = x;
      numeric[i] = (up - down) / (2.0 * eps);
      report.evaluations += 2;
    }
    tape.set_value(leaves[k], probe);

    Matrix diff = analytic;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= numeric[i];
    const double scale_ref =
        std::max(frobenius_norm(analytic), frobenius_norm(numeric));
    const double rel = scale_ref == 0.0 ? 0.0 : frobenius_norm(diff) / scale_ref;
    report.per_parameter.emplace_back(params[k].name, rel);
    if (report.worst_parameter.empty() || rel > report.max_relative_error) {
      report.max_relative_error = rel;
      report.worst_parameter = params[k].name;
    }
  }
  tape.replay();
  return report;
}

}  // namespace syhgt
