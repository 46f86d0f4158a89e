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

// Start/end span scoring over token states, its cross-entropy loss, and
// answer decoding with a null ([CLS]) option.

#ifndef SYHGT_SPAN_HEAD_HPP_
#define SYHGT_SPAN_HEAD_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "syhgt/autodiff.hpp"
#include "syhgt/tensor.hpp"
#include "syhgt/wordpiece.hpp"

namespace syhgt {

template <class T>
struct SpanHead {
  T start;  // d x 1
  T end;    // d x 1
};
using SpanHeadParams = SpanHead<Matrix>;
using SpanHeadVars = SpanHead<Var>;

template <class Head, class F>
void visit_span_head(Head& head, F&& f) {
  f("span.start", head.start);
  f("span.end", head.end);
}

SpanHeadParams init_span_head(std::size_t dim, Rng& rng);

// Gold positions in the sequence; (0, 0) means no answer.
struct SpanTargets {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const SpanTargets&) const = default;
};

// Answer-eligible positions: [CLS] plus [passage_begin, passage_end).
std::vector<bool> span_mask(std::size_t n, std::size_t passage_begin,
                            std::size_t passage_end);

// Logits as 1 x n rows; masked-out positions are -infinity. Throws
// ShapeError when mask.size() != tokens.rows().
struct SpanLogitsVars {
  Var start;
  Var end;
};
SpanLogitsVars span_logits(Var tokens, const SpanHeadVars& head,
                           const std::vector<bool>& mask);

struct SpanLogits {
  Matrix start;
  Matrix end;
};
SpanLogits span_logits(const Matrix& tokens, const SpanHeadParams& head,
                       const std::vector<bool>& mask);

// -(log softmax(start)[t.start] + log softmax(end)[t.end]). Throws
// ContractError when a target sits on a masked-out position.
Var span_loss(const SpanLogitsVars& logits, SpanTargets targets);
double span_loss(const SpanLogits& logits, SpanTargets targets);

struct SpanPrediction {
  std::vector<double> start_probs;
  std::vector<double> end_probs;
  std::optional<std::pair<std::size_t, std::size_t>> best_span;  // nullopt = no answer
  double best_score = 0.0;  // start_probs[i] * end_probs[j] of the best legal span
  double null_score = 0.0;  // start_probs[0] * end_probs[0]
  std::string answer_text;
};

// Best span over i <= j <= i + max_span_len - 1 with both ends in
// [passage_begin, passage_end). Ties go to the earliest start, then the
// shortest span. No answer when null_score > best_score * null_threshold or
// when no legal span exists.
SpanPrediction decode_span(std::span<const double> start_probs,
                           std::span<const double> end_probs,
                           std::size_t passage_begin, std::size_t passage_end,
                           std::size_t max_span_len, double null_threshold);

// Passage bytes from the first subword's char_start to the last one's
// char_end. Empty for no answer. Offsets of `sequence` entries in the span
// must refer to `passage`.
std::string extract_answer_text(
    const std::optional<std::pair<std::size_t, std::size_t>>& span,
    std::span<const SubwordToken> sequence, std::string_view passage);

}  // namespace syhgt

#endif  // SYHGT_SPAN_HEAD_HPP_
