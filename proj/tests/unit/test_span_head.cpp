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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "syhgt/error.hpp"
#include "syhgt/span_head.hpp"

using namespace syhgt;
using namespace syhgt::testing;

namespace {

std::vector<double> probs(const Matrix& logits) {
  const Matrix p = row_softmax(logits);
  return {p.data().begin(), p.data().end()};
}

}  // namespace

TEST_CASE("span_logits: zero start weights give a uniform start distribution") {
  Rng rng(1);
  const Matrix tokens = random_uniform(6, 4, -1, 1, rng);
  SpanHeadParams head = init_span_head(4, rng);
  head.start = Matrix(4, 1);
  const auto mask = span_mask(6, 3, 6);
  CHECK(mask == std::vector<bool>{true, false, false, true, true, true});
  const auto p = probs(span_logits(tokens, head, mask).start);
  for (std::size_t i = 0; i < 6; ++i) CHECK(p[i] == (mask[i] ? 0.25 : 0.0));
}

TEST_CASE("span_logits: a single eligible position takes all the mass") {
  Rng rng(2);
  const Matrix tokens = random_uniform(4, 4, -1, 1, rng);
  const auto head = init_span_head(4, rng);
  const auto p = probs(span_logits(tokens, head, span_mask(4, 2, 2)).end);
  CHECK(p == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("span_logits: hand product then softmax, d=4, n=3") {
  Rng rng(3);
  const Matrix tokens = random_uniform(3, 4, -1, 1, rng);
  const auto head = init_span_head(4, rng);
  const auto logits = span_logits(tokens, head, {true, true, true});
  double z = 0.0;
  std::vector<double> e(3);
  for (std::size_t i = 0; i < 3; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < 4; ++j) dot += tokens(i, j) * head.start(j, 0);
    CHECK(logits.start(0, i) == doctest::Approx(dot).epsilon(1e-15));
    e[i] = std::exp(dot);
    z += e[i];
  }
  const auto p = probs(logits.start);
  for (std::size_t i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(e[i] / z).epsilon(1e-14));
  CHECK_THROWS_AS(span_logits(tokens, head, {true, true}), ShapeError);
}

TEST_CASE("span_loss closed forms") {
  SpanLogits sharp{Matrix(1, 5, -30.0), Matrix(1, 5, -30.0)};
  sharp.start(0, 2) = 30.0;
  sharp.end(0, 3) = 30.0;
  CHECK(span_loss(sharp, {2, 3}) <= 1e-6);

  const double ninf = -std::numeric_limits<double>::infinity();
  SpanLogits uniform{Matrix(1, 6, 0.5), Matrix(1, 6, 0.5)};
  uniform.start(0, 1) = uniform.end(0, 1) = ninf;
  uniform.start(0, 2) = uniform.end(0, 2) = ninf;
  CHECK(span_loss(uniform, {3, 4}) == doctest::Approx(2 * std::log(4.0)).epsilon(1e-14));
  CHECK_THROWS_AS(span_loss(uniform, {1, 4}), ContractError);
  CHECK_THROWS_AS(span_loss(uniform, {3, 2}), ContractError);
  CHECK_THROWS_AS(span_loss(uniform, {3, 9}), ContractError);
}

TEST_CASE("span_loss: fixture against a scalar recomputation") {
  const Matrix s = Matrix::from_rows({{0.3, -1.2, 2.0, 0.7}});
  const Matrix e = Matrix::from_rows({{-0.4, 0.1, 0.9, 1.5}});
  auto lse = [](const Matrix& m) {
    double z = 0.0;
    for (double x : m.data()) z += std::exp(x);
    return std::log(z);
  };
  const double expected = -(s(0, 2) - lse(s)) - (e(0, 3) - lse(e));
  CHECK(span_loss(SpanLogits{s, e}, {2, 3}) == doctest::Approx(expected).epsilon(1e-14));
  Tape tape;
  const Var v = span_loss(SpanLogitsVars{tape.leaf(s), tape.leaf(e)}, {2, 3});
  CHECK(v.value()(0, 0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("property: loss gradient is softmax minus one-hot") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    const Matrix s = random_uniform(1, n, -3, 3, rng);
    const Matrix e = random_uniform(1, n, -3, 3, rng);
    const SpanTargets t{rng.below(n), rng.below(n)};
    Tape tape;
    const Var sv = tape.leaf(s);
    const Var ev = tape.leaf(e);
    tape.backward(span_loss(SpanLogitsVars{sv, ev}, t));
    Matrix expected = row_softmax(s);
    expected(0, t.start) -= 1.0;
    CHECK(max_abs_diff(tape.grad(sv), expected) < 1e-14);

    // and central differences agree to 1e-6 relative
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Matrix plus = e, minus = e;
      plus(0, i) += 1e-6;
      minus(0, i) -= 1e-6;
      const double fd = (span_loss(SpanLogits{s, plus}, t) - span_loss(SpanLogits{s, minus}, t)) / 2e-6;
      diff2 += (fd - tape.grad(ev)(0, i)) * (fd - tape.grad(ev)(0, i));
      norm2 += fd * fd;
    }
    CHECK(std::sqrt(diff2 / norm2) < 1e-6);
  }
}

TEST_CASE("decode_span examples") {
  const std::vector<double> cls{1, 0, 0, 0, 0};
  const auto none = decode_span(cls, cls, 2, 5, 30, 1.0);
  CHECK_FALSE(none.best_span.has_value());
  CHECK(none.null_score == 1.0);

  const std::vector<double> s{0, 0, 0.1, 0.8, 0.1};
  const std::vector<double> e{0, 0, 0.1, 0.1, 0.8};
  const auto p = decode_span(s, e, 2, 5, 30, 1.0);
  REQUIRE(p.best_span.has_value());
  CHECK(*p.best_span == std::make_pair<std::size_t, std::size_t>(3, 4));
  CHECK(p.best_score == doctest::Approx(0.64));

  // unconstrained argmax is start 4, end 2; the best legal span differs
  const std::vector<double> s2{0.0, 0.0, 0.2, 0.3, 0.5};
  const std::vector<double> e2{0.0, 0.0, 0.6, 0.3, 0.1};
  const auto c = decode_span(s2, e2, 2, 5, 30, 1.0);
  const auto ref = exhaustive_decode(s2, e2, 2, 5, 30, 1.0);
  REQUIRE(c.best_span.has_value());
  CHECK(*c.best_span == std::make_pair<std::size_t, std::size_t>(2, 2));
  CHECK(c.best_span == ref.span);

  // span length limit
  const auto lim = decode_span(s, e, 2, 5, 1, 1.0);
  CHECK(*lim.best_span == std::make_pair<std::size_t, std::size_t>(3, 3));
  // no legal span at all
  CHECK_FALSE(decode_span(s, e, 5, 5, 30, 1.0).best_span.has_value());
  CHECK_FALSE(decode_span(s, e, 2, 5, 0, 1.0).best_span.has_value());
}

TEST_CASE("decode_span ties: earliest start, then shortest") {
  const std::vector<double> s{0, 0.25, 0.25, 0.25, 0.25};
  const std::vector<double> e{0, 0.25, 0.25, 0.25, 0.25};
  const auto p = decode_span(s, e, 1, 5, 30, 1.0);
  CHECK(*p.best_span == std::make_pair<std::size_t, std::size_t>(1, 1));
  // equal null and span score: null must be strictly larger to win
  const std::vector<double> s3{0.5, 0.5};
  const auto q = decode_span(s3, s3, 1, 2, 30, 1.0);
  CHECK(q.best_span.has_value());
}

TEST_CASE("property: decode equals exhaustive search") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const bool ties = trial % 2 == 0;
    const auto s = random_distribution(rng, n, ties);
    const auto e = random_distribution(rng, n, ties);
    const std::size_t pb = 1 + rng.below(n);
    const std::size_t pe = pb + rng.below(n - pb + 1);
    const std::size_t max_len = rng.below(12);
    const double thr = rng.uniform(0.0, 3.0);
    const auto got = decode_span(s, e, pb, pe, max_len, thr);
    const auto want = exhaustive_decode(s, e, pb, pe, max_len, thr);
    CHECK(got.best_span == want.span);
    if (want.span) CHECK(got.best_score == want.best_score);
  }
}

// null wins iff null > best * thr, so a larger factor only ever admits more answers
TEST_CASE("property: threshold monotonicity") {
  Rng rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(20);
    const auto s = random_distribution(rng, n, false);
    const auto e = random_distribution(rng, n, false);
    double prev_thr = 0.0;
    bool answered = false;
    for (int k = 0; k < 10; ++k) {
      const double thr = prev_thr + rng.uniform(0.0, 1.0);
      const bool now = decode_span(s, e, 1, n, 30, thr).best_span.has_value();
      if (answered) CHECK(now);
      answered = now;
      prev_thr = thr;
    }
  }
}

TEST_CASE("property: start and end distributions sum to one") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(20);
    const Matrix tokens = random_uniform(n, 8, -2, 2, rng);
    const auto head = init_span_head(8, rng);
    const auto l = span_logits(tokens, head, span_mask(n, 1 + rng.below(n - 1), n));
    double total = 0.0;
    for (double x : probs(l.start)) total += x;
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("extract_answer_text") {
  const std::string passage = "ships and steamboats";
  std::vector<SubwordToken> seq{fixture_vocab().special(kClsPiece)};
  for (auto& t : tokenize_subwords(passage, fixture_vocab())) seq.push_back(t);
  // [CLS] ships and steam ##boats
  CHECK(extract_answer_text(std::make_pair<std::size_t, std::size_t>(3, 4), seq, passage) ==
        "steamboats");
  CHECK(extract_answer_text(std::nullopt, seq, passage).empty());
  CHECK(extract_answer_text(std::make_pair<std::size_t, std::size_t>(1, 1), seq, passage) ==
        "ships");
  CHECK(extract_answer_text(std::make_pair<std::size_t, std::size_t>(1, 3), seq, passage) ==
        "ships and steam");
  CHECK_THROWS_AS(
      extract_answer_text(std::make_pair<std::size_t, std::size_t>(3, 9), seq, passage),
      ContractError);
}
