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

#include "syhgt/span_head.hpp"

#include <cmath>

#include "syhgt/error.hpp"

namespace syhgt {

SpanHeadParams init_span_head(std::size_t dim, Rng& rng) {
  SpanHeadParams head;
  head.start = xavier_uniform(dim, 1, rng);
  head.end = xavier_uniform(dim, 1, rng);
  return head;
}

std::vector<bool> span_mask(std::size_t n, std::size_t passage_begin,
                            std::size_t passage_end) {
  std::vector<bool> mask(n, false);
  if (n > 0) mask[0] = true;
  for (std::size_t i = passage_begin; i < passage_end && i < n; ++i) mask[i] = true;
  return mask;
}

namespace {

void check_mask(std::size_t rows, const std::vector<bool>& mask) {
  if (mask.size() != rows) {
    throw ShapeError("span mask has " + std::to_string(mask.size()) +
                     " entries for " + std::to_string(rows) + " tokens");
  }
}

void check_target(const Matrix& logits, std::size_t pos, const char* which) {
  if (pos >= logits.cols() || std::isinf(logits(0, pos))) {
    throw ContractError(std::string(which) + " target " + std::to_string(pos) +
                        " is not an eligible position");
  }
}

}  // namespace

SpanLogitsVars span_logits(Var tokens, const SpanHeadVars& head,
                           const std::vector<bool>& mask) {
  check_mask(tokens.rows(), mask);
  return {mask_fill(transpose(matmul(tokens, head.start)), mask),
          mask_fill(transpose(matmul(tokens, head.end)), mask)};
}

SpanLogits span_logits(const Matrix& tokens, const SpanHeadParams& head,
                       const std::vector<bool>& mask) {
  Tape tape;
  const auto v = span_logits(tape.constant(tokens),
                             {tape.constant(head.start), tape.constant(head.end)},
                             mask);
  return {v.start.value(), v.end.value()};
}

Var span_loss(const SpanLogitsVars& logits, SpanTargets targets) {
  check_target(logits.start.value(), targets.start, "start");
  check_target(logits.end.value(), targets.end, "end");
  const Var ls = pick(row_log_softmax(logits.start), 0, targets.start);
  const Var le = pick(row_log_softmax(logits.end), 0, targets.end);
  return scale(add(ls, le), -1.0);
}

double span_loss(const SpanLogits& logits, SpanTargets targets) {
  check_target(logits.start, targets.start, "start");
  check_target(logits.end, targets.end, "end");
  return -(row_log_softmax(logits.start)(0, targets.start) +
           row_log_softmax(logits.end)(0, targets.end));
}

SpanPrediction decode_span(std::span<const double> start_probs,
                           std::span<const double> end_probs,
                           std::size_t passage_begin, std::size_t passage_end,
                           std::size_t max_span_len, double null_threshold) {
  if (start_probs.size() != end_probs.size()) {
    throw ShapeError("start and end distributions differ in length");
  }
  SpanPrediction pred;
  pred.start_probs.assign(start_probs.begin(), start_probs.end());
  pred.end_probs.assign(end_probs.begin(), end_probs.end());
  const std::size_t n = start_probs.size();
  if (n == 0) return pred;
  pred.null_score = start_probs[0] * end_probs[0];

  passage_end = std::min(passage_end, n);
  bool found = false;
  std::pair<std::size_t, std::size_t> best{0, 0};
  for (std::size_t i = passage_begin; i < passage_end; ++i) {
    const std::size_t last = std::min(passage_end, i + max_span_len);
    for (std::size_t j = i; j < last; ++j) {
      const double score = start_probs[i] * end_probs[j];
      if (!found || score > pred.best_score) {
        found = true;
        pred.best_score = score;
        best = {i, j};
      }
    }
  }
  if (found && !(pred.null_score > pred.best_score * null_threshold)) {
    pred.best_span = best;
  }
  return pred;
}

std::string extract_answer_text(
    const std::optional<std::pair<std::size_t, std::size_t>>& span,
    std::span<const SubwordToken> sequence, std::string_view passage) {
  if (!span) return {};
  const auto [i, j] = *span;
  if (i > j || j >= sequence.size()) {
    throw ContractError("span (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") outside the sequence");
  }
  const std::size_t begin = sequence[i].char_start;
  const std::size_t end = sequence[j].char_end;
  if (begin > end || end > passage.size()) {
    throw ContractError("span offsets fall outside the passage");
  }
  return std::string(passage.substr(begin, end - begin));
}

}  // namespace syhgt
