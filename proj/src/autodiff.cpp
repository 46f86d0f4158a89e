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

#include "syhgt/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "syhgt/error.hpp"

namespace syhgt {

const Matrix& Var::value() const { return tape_->value(*this); }

Var Tape::leaf(Matrix value, bool requires_grad) {
  Node node;
  node.op = "leaf";
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  node.is_leaf = true;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

std::vector<const Matrix*> Tape::input_values(const Node& node) const {
  std::vector<const Matrix*> values;
  values.reserve(node.inputs.size());
  for (std::size_t id : node.inputs) values.push_back(&nodes_[id].value);
  return values;
}

Var Tape::record(std::string op, std::vector<Var> inputs, ForwardFn forward,
                 BackwardFn backward) {
  Node node;
  node.op = std::move(op);
  for (const Var& v : inputs) {
    if (&v.tape() != this) {
      throw ContractError(node.op + ": input recorded on a different tape");
    }
    node.inputs.push_back(v.id());
    node.requires_grad = node.requires_grad || nodes_[v.id()].requires_grad;
  }
  const auto values = input_values(node);
  node.value = forward(values);
  node.forward = std::move(forward);
  node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Matrix& Tape::grad(Var v) const {
  const Node& node = nodes_.at(v.id());
  if (!node.grad.same_shape(node.value)) {
    throw ContractError("gradient requested before backward()");
  }
  return node.grad;
}

void Tape::set_value(Var leaf, Matrix value) {
  Node& node = nodes_.at(leaf.id());
  if (!node.is_leaf) throw ContractError("set_value on a non-leaf node");
  if (!node.value.same_shape(value)) {
    throw ShapeError("set_value: " + value.shape() + " for leaf " +
                     node.value.shape());
  }
  node.value = std::move(value);
}

void Tape::replay() {
  for (Node& node : nodes_) {
    if (node.is_leaf) continue;
    node.value = node.forward(input_values(node));
  }
}

void Tape::backward(Var loss) {
  const Node& out = nodes_.at(loss.id());
  if (out.value.rows() != 1 || out.value.cols() != 1) {
    throw ContractError("backward needs a 1x1 loss, got " + out.value.shape());
  }
  for (Node& node : nodes_) {
    node.grad = Matrix(node.value.rows(), node.value.cols());
  }
  nodes_[loss.id()].grad(0, 0) = 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (node.is_leaf || !node.requires_grad) continue;
    std::vector<Matrix*> grads;
    grads.reserve(node.inputs.size());
    for (std::size_t in : node.inputs) {
      grads.push_back(nodes_[in].requires_grad ? &nodes_[in].grad : nullptr);
    }
    const auto values = input_values(node);
    node.backward(node.grad, values, node.value, grads);
  }
}

namespace {

using Inputs = Tape::Inputs;
using Grads = std::span<Matrix* const>;

void accumulate(Matrix* dst, const Matrix& delta) {
  if (dst == nullptr) return;
  for (std::size_t i = 0; i < dst->size(); ++i) (*dst)[i] += delta[i];
}

Tape& common_tape(std::initializer_list<Var> vars) {
  Tape* tape = &vars.begin()->tape();
  for (const Var& v : vars) {
    if (&v.tape() != tape) throw ContractError("inputs live on different tapes");
  }
  return *tape;
}

void check_index(std::span<const std::size_t> index, std::size_t rows,
                 const char* op) {
  for (std::size_t i : index) {
    if (i >= rows) {
      throw ShapeError(std::string(op) + ": row index " + std::to_string(i) +
                       " out of range for " + std::to_string(rows) + " rows");
    }
  }
}

}  // namespace

Var matmul(Var a, Var b) {
  return common_tape({a, b}).record(
      "matmul", {a, b}, [](Inputs in) { return matmul(*in[0], *in[1]); },
      [](const Matrix& g, Inputs in, const Matrix&, Grads d) {
        if (d[0]) accumulate(d[0], matmul(g, transpose(*in[1])));
        if (d[1]) accumulate(d[1], matmul(transpose(*in[0]), g));
      });
}

Var transpose(Var a) {
  return a.tape().record(
      "transpose", {a}, [](Inputs in) { return transpose(*in[0]); },
      [](const Matrix& g, Inputs, const Matrix&, Grads d) {
        accumulate(d[0], transpose(g));
      });
}

Var add(Var a, Var b) {
  return common_tape({a, b}).record(
      "add", {a, b}, [](Inputs in) { return add(*in[0], *in[1]); },
      [](const Matrix& g, Inputs, const Matrix&, Grads d) {
        accumulate(d[0], g);
        accumulate(d[1], g);
      });
}

Var hadamard(Var a, Var b) {
  return common_tape({a, b}).record(
      "hadamard", {a, b}, [](Inputs in) { return hadamard(*in[0], *in[1]); },
      [](const Matrix& g, Inputs in, const Matrix&, Grads d) {
        if (d[0]) accumulate(d[0], hadamard(g, *in[1]));
        if (d[1]) accumulate(d[1], hadamard(g, *in[0]));
      });
}

Var scale(Var a, double s) {
  return a.tape().record(
      "scale", {a}, [s](Inputs in) { return scale(*in[0], s); },
      [s](const Matrix& g, Inputs, const Matrix&, Grads d) {
        accumulate(d[0], scale(g, s));
      });
}

Var scale_by(Var a, Var s) {
  if (s.rows() != 1 || s.cols() != 1) {
    throw ShapeError("scale_by: factor must be 1x1, got " + s.value().shape());
  }
  return common_tape({a, s}).record(
      "scale_by", {a, s}, [](Inputs in) { return scale(*in[0], (*in[1])[0]); },
      [](const Matrix& g, Inputs in, const Matrix&, Grads d) {
        if (d[0]) accumulate(d[0], scale(g, (*in[1])[0]));
        if (d[1]) (*d[1])[0] += sum(hadamard(g, *in[0]));
      });
}

Var scale_rows(Var a, Var w) {
  if (w.cols() != 1 || w.rows() != a.rows()) {
    throw ShapeError("scale_rows: weights " + w.value().shape() +
                     " do not match " + a.value().shape());
  }
  return common_tape({a, w}).record(
      "scale_rows", {a, w},
      [](Inputs in) {
        Matrix out = *in[0];
        for (std::size_t r = 0; r < out.rows(); ++r) {
          for (double& v : out.row(r)) v *= (*in[1])(r, 0);
        }
        return out;
      },
      [](const Matrix& g, Inputs in, const Matrix&, Grads d) {
        const Matrix& a = *in[0];
        const Matrix& w = *in[1];
        for (std::size_t r = 0; r < a.rows(); ++r) {
          double dw = 0.0;
          for (std::size_t c = 0; c < a.cols(); ++c) {
            if (d[0]) (*d[0])(r, c) += g(r, c) * w(r, 0);
            dw += g(r, c) * a(r, c);
          }
          if (d[1]) (*d[1])(r, 0) += dw;
        }
      });
}

Var exp(Var a) {
  return a.tape().record(
      "exp", {a},
      [](Inputs in) {
        Matrix out = *in[0];
        for (double& v : out.data()) v = std::exp(v);
        return out;
      },
      [](const Matrix& g, Inputs, const Matrix& out, Grads d) {
        accumulate(d[0], hadamard(g, out));
      });
}

Var relu(Var a) {
  return a.tape().record(
      "relu", {a}, [](Inputs in) { return relu(*in[0]); },
      [](const Matrix& g, Inputs in, const Matrix&, Grads d) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          if ((*in[0])[i] > 0.0) (*d[0])[i] += g[i];
        }
      });
}

Var row_softmax(Var a) {
  return a.tape().record(
      "row_softmax", {a}, [](Inputs in) { return row_softmax(*in[0]); },
      [](const Matrix& g, Inputs, const Matrix& y, Grads d) {
        for (std::size_t r = 0; r < y.rows(); ++r) {
          double dot = 0.0;
          for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
          for (std::size_t c = 0; c < y.cols(); ++c) {
            (*d[0])(r, c) += y(r, c) * (g(r, c) - dot);
          }
        }
      });
}

Var row_log_softmax(Var a) {
  return a.tape().record(
      "row_log_softmax", {a}, [](Inputs in) { return row_log_softmax(*in[0]); },
      [](const Matrix& g, Inputs, const Matrix& out, Grads d) {
        for (std::size_t r = 0; r < out.rows(); ++r) {
          double total = 0.0;
          for (std::size_t c = 0; c < out.cols(); ++c) total += g(r, c);
          for (std::size_t c = 0; c < out.cols(); ++c) {
            (*d[0])(r, c) += g(r, c) - std::exp(out(r, c)) * total;
          }
        }
      });
}

Var segment_softmax(Var scores, std::vector<std::size_t> segment,
                    std::size_t num_segments) {
  if (scores.cols() != 1 || scores.rows() != segment.size()) {
    throw ShapeError("segment_softmax: scores " + scores.value().shape() +
                     " for " + std::to_string(segment.size()) + " segments ids");
  }
  check_index(segment, num_segments, "segment_softmax");
  auto forward = [segment, num_segments](Inputs in) {
    const Matrix& s = *in[0];
    std::vector<double> peak(num_segments,
                             -std::numeric_limits<double>::infinity());
    for (std::size_t e = 0; e < segment.size(); ++e) {
      peak[segment[e]] = std::max(peak[segment[e]], s[e]);
    }
    Matrix out(s.rows(), 1);
    std::vector<double> z(num_segments, 0.0);
    for (std::size_t e = 0; e < segment.size(); ++e) {
      out[e] = std::exp(s[e] - peak[segment[e]]);
      z[segment[e]] += out[e];
    }
    for (std::size_t e = 0; e < segment.size(); ++e) out[e] /= z[segment[e]];
    return out;
  };
  auto backward = [segment, num_segments](const Matrix& g, Inputs,
                                          const Matrix& y, Grads d) {
    std::vector<double> dot(num_segments, 0.0);
    for (std::size_t e = 0; e < segment.size(); ++e) {
      dot[segment[e]] += g[e] * y[e];
    }
    for (std::size_t e = 0; e < segment.size(); ++e) {
      (*d[0])[e] += y[e] * (g[e] - dot[segment[e]]);
    }
  };
  return scores.tape().record("segment_softmax", {scores}, std::move(forward),
                              std::move(backward));
}

Var gather_rows(Var a, std::vector<std::size_t> index) {
  check_index(index, a.rows(), "gather_rows");
  return a.tape().record(
      "gather_rows", {a},
      [index](Inputs in) { return gather_rows(*in[0], index); },
      [index](const Matrix& g, Inputs, const Matrix&, Grads d) {
        for (std::size_t i = 0; i < index.size(); ++i) {
          auto dst = d[0]->row(index[i]);
          const auto src = g.row(i);
          for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
        }
      });
}

Var scatter_rows(Var a, std::vector<std::size_t> index, std::size_t rows) {
  if (index.size() != a.rows()) {
    throw ShapeError("scatter_rows: " + std::to_string(index.size()) +
                     " indices for " + a.value().shape());
  }
  check_index(index, rows, "scatter_rows");
  return a.tape().record(
      "scatter_rows", {a},
      [index, rows](Inputs in) {
        Matrix out(rows, in[0]->cols());
        for (std::size_t i = 0; i < index.size(); ++i) {
          auto dst = out.row(index[i]);
          const auto src = in[0]->row(i);
          for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
        }
        return out;
      },
      [index](const Matrix& g, Inputs, const Matrix&, Grads d) {
        accumulate(d[0], gather_rows(g, index));
      });
}

Var scatter_add_into(Var base, Var src, std::vector<std::size_t> index) {
  if (index.size() != src.rows() || src.cols() != base.cols()) {
    throw ShapeError("scatter_add_into: " + src.value().shape() + " into " +
                     base.value().shape() + " with " +
                     std::to_string(index.size()) + " indices");
  }
  check_index(index, base.rows(), "scatter_add_into");
  return common_tape({base, src})
      .record(
          "scatter_add_into", {base, src},
          [index](Inputs in) {
            Matrix out = *in[0];
            for (std::size_t i = 0; i < index.size(); ++i) {
              auto dst = out.row(index[i]);
              const auto row = in[1]->row(i);
              for (std::size_t c = 0; c < row.size(); ++c) dst[c] += row[c];
            }
            return out;
          },
          [index](const Matrix& g, Inputs, const Matrix&, Grads d) {
            accumulate(d[0], g);
            if (d[1]) accumulate(d[1], gather_rows(g, index));
          });
}

Var group_mean(Var a, std::vector<std::vector<std::size_t>> groups) {
  for (const auto& grp : groups) {
    if (grp.empty()) throw ContractError("group_mean: empty group");
    check_index(grp, a.rows(), "group_mean");
  }
  return a.tape().record(
      "group_mean", {a},
      [groups](Inputs in) {
        Matrix out(groups.size(), in[0]->cols());
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
          auto dst = out.row(gi);
          for (std::size_t r : groups[gi]) {
            const auto src = in[0]->row(r);
            for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
          }
          const double n = static_cast<double>(groups[gi].size());
          for (double& v : dst) v /= n;
        }
        return out;
      },
      [groups](const Matrix& g, Inputs, const Matrix&, Grads d) {
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
          const double n = static_cast<double>(groups[gi].size());
          const auto src = g.row(gi);
          for (std::size_t r : groups[gi]) {
            auto dst = d[0]->row(r);
            for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c] / n;
          }
        }
      });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  for (const Var& p : parts) {
    if (&p.tape() != &parts.front().tape()) {
      throw ContractError("concat_cols: inputs live on different tapes");
    }
    if (p.rows() != parts.front().rows()) {
      throw ShapeError("concat_cols: row counts differ");
    }
  }
  return parts.front().tape().record(
      "concat_cols", parts,
      [](Inputs in) {
        std::size_t cols = 0;
        for (const Matrix* m : in) cols += m->cols();
        Matrix out(in[0]->rows(), cols);
        std::size_t at = 0;
        for (const Matrix* m : in) {
          for (std::size_t r = 0; r < m->rows(); ++r) {
            std::copy_n(m->row(r).begin(), m->cols(), out.row(r).begin() + at);
          }
          at += m->cols();
        }
        return out;
      },
      [](const Matrix& g, Inputs in, const Matrix&, Grads d) {
        std::size_t at = 0;
        for (std::size_t k = 0; k < in.size(); ++k) {
          if (d[k]) {
            for (std::size_t r = 0; r < g.rows(); ++r) {
              for (std::size_t c = 0; c < in[k]->cols(); ++c) {
                (*d[k])(r, c) += g(r, at + c);
              }
            }
          }
          at += in[k]->cols();
        }
      });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractError("concat_rows: no inputs");
  for (const Var& p : parts) {
    if (&p.tape() != &parts.front().tape()) {
      throw ContractError("concat_rows: inputs live on different tapes");
    }
    if (p.cols() != parts.front().cols()) {
      throw ShapeError("concat_rows: column counts differ");
    }
  }
  return parts.front().tape().record(
      "concat_rows", parts,
      [](Inputs in) {
        std::size_t rows = 0;
        for (const Matrix* m : in) rows += m->rows();
        Matrix out(rows, in[0]->cols());
        std::size_t at = 0;
        for (const Matrix* m : in) {
          std::copy(m->data().begin(), m->data().end(),
                    out.data().begin() + static_cast<std::ptrdiff_t>(at));
          at += m->size();
        }
        return out;
      },
      [](const Matrix& g, Inputs in, const Matrix&, Grads d) {
        std::size_t at = 0;
        for (std::size_t k = 0; k < in.size(); ++k) {
          if (d[k]) {
            for (std::size_t i = 0; i < in[k]->size(); ++i) (*d[k])[i] += g[at + i];
          }
          at += in[k]->size();
        }
      });
}

Var slice_cols(Var a, std::size_t begin, std::size_t count) {
  if (begin + count > a.cols()) {
    throw ShapeError("slice_cols: [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") out of " +
                     a.value().shape());
  }
  return a.tape().record(
      "slice_cols", {a},
      [begin, count](Inputs in) {
        Matrix out(in[0]->rows(), count);
        for (std::size_t r = 0; r < out.rows(); ++r) {
          std::copy_n(in[0]->row(r).begin() + static_cast<std::ptrdiff_t>(begin),
                      count, out.row(r).begin());
        }
        return out;
      },
      [begin, count](const Matrix& g, Inputs, const Matrix&, Grads d) {
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < count; ++c) (*d[0])(r, begin + c) += g(r, c);
        }
      });
}

Var slice_rows(Var a, std::size_t begin, std::size_t count) {
  if (begin + count > a.rows()) {
    throw ShapeError("slice_rows: [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") out of " +
                     a.value().shape());
  }
  return a.tape().record(
      "slice_rows", {a},
      [begin, count](Inputs in) {
        const std::size_t cols = in[0]->cols();
        const auto first = in[0]->data().begin() +
                           static_cast<std::ptrdiff_t>(begin * cols);
        return Matrix(count, cols,
                      std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * cols)));
      },
      [begin](const Matrix& g, Inputs in, const Matrix&, Grads d) {
        const std::size_t off = begin * in[0]->cols();
        for (std::size_t i = 0; i < g.size(); ++i) (*d[0])[off + i] += g[i];
      });
}

Var row_sum(Var a) {
  return a.tape().record(
      "row_sum", {a},
      [](Inputs in) {
        Matrix out(in[0]->rows(), 1);
        for (std::size_t r = 0; r < out.rows(); ++r) {
          for (double v : in[0]->row(r)) out(r, 0) += v;
        }
        return out;
      },
      [](const Matrix& g, Inputs, const Matrix&, Grads d) {
        for (std::size_t r = 0; r < d[0]->rows(); ++r) {
          for (double& v : d[0]->row(r)) v += g(r, 0);
        }
      });
}

Var sum(Var a) {
  return a.tape().record(
      "sum", {a}, [](Inputs in) { return Matrix(1, 1, sum(*in[0])); },
      [](const Matrix& g, Inputs, const Matrix&, Grads d) {
        for (double& v : d[0]->data()) v += g[0];
      });
}

Var mean(Var a) {
  if (a.value().empty()) throw ContractError("mean of an empty matrix");
  return a.tape().record(
      "mean", {a},
      [](Inputs in) {
        return Matrix(1, 1, sum(*in[0]) / static_cast<double>(in[0]->size()));
      },
      [](const Matrix& g, Inputs, const Matrix&, Grads d) {
        const double share = g[0] / static_cast<double>(d[0]->size());
        for (double& v : d[0]->data()) v += share;
      });
}

Var mask_fill(Var a, std::vector<bool> keep) {
  if (keep.size() != a.value().size()) {
    throw ShapeError("mask_fill: mask of length " + std::to_string(keep.size()) +
                     " for " + a.value().shape());
  }
  return a.tape().record(
      "mask_fill", {a},
      [keep](Inputs in) {
        Matrix out = *in[0];
        for (std::size_t i = 0; i < keep.size(); ++i) {
          if (!keep[i]) out[i] = -std::numeric_limits<double>::infinity();
        }
        return out;
      },
      [keep](const Matrix& g, Inputs, const Matrix&, Grads d) {
        for (std::size_t i = 0; i < keep.size(); ++i) {
          if (keep[i]) (*d[0])[i] += g[i];
        }
      });
}

Var pick(Var a, std::size_t r, std::size_t c) {
  if (r >= a.rows() || c >= a.cols()) {
    throw ShapeError("pick: (" + std::to_string(r) + ", " + std::to_string(c) +
                     ") out of " + a.value().shape());
  }
  return a.tape().record(
      "pick", {a}, [r, c](Inputs in) { return Matrix(1, 1, (*in[0])(r, c)); },
      [r, c](const Matrix& g, Inputs, const Matrix&, Grads d) {
        (*d[0])(r, c) += g[0];
      });
}

}  // namespace syhgt
