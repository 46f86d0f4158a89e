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

// Reverse-mode differentiation over Matrix values.
//
// A Tape records every operation as a node holding its value, a forward
// function (so the tape can be replayed after a leaf changes) and a
// backward function that accumulates input gradients. Nodes are appended in
// evaluation order, which is therefore a topological order; backward() walks
// it in reverse. A Tape is confined to one thread.

#ifndef SYHGT_AUTODIFF_HPP_
#define SYHGT_AUTODIFF_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "syhgt/tensor.hpp"

namespace syhgt {

class Tape;

// Handle to a tape node. Cheap to copy; valid while its Tape lives.
class Var {
 public:
  Var() = default;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using Inputs = std::span<const Matrix* const>;
  using ForwardFn = std::function<Matrix(Inputs)>;
  // Receives the output gradient and accumulates into the input gradients.
  // Entries of `input_grads` are null for inputs that need no gradient.
  using BackwardFn = std::function<void(const Matrix& out_grad, Inputs inputs,
                                        const Matrix& out_value,
                                        std::span<Matrix* const> input_grads)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Matrix value, bool requires_grad = true);
  Var constant(Matrix value) { return leaf(std::move(value), false); }

  Var record(std::string op, std::vector<Var> inputs, ForwardFn forward,
             BackwardFn backward);

  const Matrix& value(Var v) const { return nodes_.at(v.id()).value; }
  // Zero-filled when the node received no gradient.
  const Matrix& grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id()).requires_grad; }

  // Replaces a leaf's value. Call replay() to propagate.
  void set_value(Var leaf, Matrix value);

  // Recomputes every non-leaf node in recording order.
  void replay();

  // Gradients of the 1x1 `loss` with respect to every node that requires
  // one. Throws ContractError for a non-scalar loss.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  const std::string& op_name(Var v) const { return nodes_.at(v.id()).op; }

 private:
  struct Node {
    std::string op;
    std::vector<std::size_t> inputs;
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool is_leaf = false;
    ForwardFn forward;
    BackwardFn backward;
  };

  std::vector<const Matrix*> input_values(const Node& node) const;

  std::vector<Node> nodes_;
};

// Differentiable primitives. All inputs must live on the same tape.
Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double s);
// Multiplies every entry of `a` by the 1x1 `s`.
Var scale_by(Var a, Var s);
// Multiplies row i of `a` by w(i, 0); w is rows x 1.
Var scale_rows(Var a, Var w);
Var exp(Var a);
Var relu(Var a);
Var row_softmax(Var a);
Var row_log_softmax(Var a);

// Softmax of a column of scores (E x 1) within groups: entries sharing
// segment[e] are normalized together.
Var segment_softmax(Var scores, std::vector<std::size_t> segment,
                    std::size_t num_segments);

Var gather_rows(Var a, std::vector<std::size_t> index);
// rows x a.cols() zeros with row i of `a` added into row index[i].
Var scatter_rows(Var a, std::vector<std::size_t> index, std::size_t rows);
// Copy of `base` with row i of `src` added into row index[i]. Rows not
// named in `index` are copied bit for bit.
Var scatter_add_into(Var base, Var src, std::vector<std::size_t> index);
// Row g of the result is the mean of the rows of `a` listed in groups[g].
Var group_mean(Var a, std::vector<std::vector<std::size_t>> groups);

Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var slice_cols(Var a, std::size_t begin, std::size_t count);
Var slice_rows(Var a, std::size_t begin, std::size_t count);
// rows x 1 sums of each row.
Var row_sum(Var a);
// 1x1 sum / mean of all entries.
Var sum(Var a);
Var mean(Var a);
// Sets entries where mask is false to -infinity; no gradient flows there.
// The mask has one entry per element of `a`, row-major.
Var mask_fill(Var a, std::vector<bool> keep);
// 1x1 holding a(r, c).
Var pick(Var a, std::size_t r, std::size_t c);

}  // namespace syhgt

#endif  // SYHGT_AUTODIFF_HPP_
