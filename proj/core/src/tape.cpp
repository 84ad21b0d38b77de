/*
 * Copyright 2026 The ORVOS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "orvos/tape.hpp"

#include <cmath>
#include <string>

#include "orvos/errors.hpp"
#include "orvos/ops.hpp"

namespace orvos {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) throw ShapeError(std::string(op) + ": " + dims(a) + " vs " + dims(b));
}

}  // namespace

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) throw InvalidArgument("tape: invalid variable handle");
  return nodes_[v.id];
}

bool Tape::any_requires_grad(std::initializer_list<Var> inputs) const {
  if (!recording_) return false;
  for (Var v : inputs)
    if (node(v).requires_grad) return true;
  return false;
}

Var Tape::push(Matrix value, std::initializer_list<Var> inputs, Backprop backprop) {
  return push(std::move(value), any_requires_grad(inputs), std::move(backprop));
}

Var Tape::push(Matrix value, bool requires_grad, Backprop backprop) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

void Tape::accumulate(Var v, const Matrix& g) {
  Node& n = nodes_[v.id];
  if (!n.requires_grad) return;
  if (n.grad.empty() && !n.value.empty()) {
    n.grad = g;
    return;
  }
  axpy(1.0, g, n.grad);
}

Var Tape::constant(Matrix value) { return push(std::move(value), false, nullptr); }

Var Tape::parameter(const Parameter& p) {
  if (auto it = param_leaves_.find(&p); it != param_leaves_.end()) return it->second;
  Var v = push(p.value, recording_, nullptr);
  nodes_[v.id].param = &p;
  param_leaves_.emplace(&p, v);
  return v;
}

Var Tape::parameter(const ParamStore& store, std::string_view name) {
  return parameter(store.at(name));
}

const Matrix& Tape::value(Var v) const { return node(v).value; }

Matrix Tape::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.empty()) return Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

void Tape::backward(Var loss) {
  if (!recording_) throw StateError("backward on a tape that does not record gradients");
  const Node& l = node(loss);
  if (l.value.rows() != 1 || l.value.cols() != 1) {
    throw ShapeError("backward: loss must be 1x1, got " + dims(l.value));
  }
  for (auto& n : nodes_) n.grad = Matrix();
  if (!l.requires_grad) return;
  nodes_[loss.id].grad = Matrix(1, 1, 1.0);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.backprop) n.backprop(*this, n.grad);
    if (n.param != nullptr) {
      axpy(1.0, n.grad, n.param->grad);
      n.param->grad_populated = true;
    }
  }
}

Var Tape::matmul(Var a, Var b) {
  Matrix out = orvos::matmul(value(a), value(b));
  return push(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) t.accumulate(a, matmul_nt(g, t.value(b)));
    if (t.requires_grad(b)) t.accumulate(b, matmul_tn(t.value(a), g));
  });
}

Var Tape::add(Var a, Var b) {
  require_same(value(a), value(b), "add");
  Matrix out = value(a);
  axpy(1.0, value(b), out);
  return push(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var Tape::sub(Var a, Var b) {
  require_same(value(a), value(b), "sub");
  Matrix out = value(a);
  axpy(-1.0, value(b), out);
  return push(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    if (t.requires_grad(b)) {
      Matrix neg = g;
      for (double& v : neg.values()) v = -v;
      t.accumulate(b, neg);
    }
  });
}

Var Tape::mul(Var a, Var b) {
  require_same(value(a), value(b), "mul");
  Matrix out = value(a);
  const Matrix& vb = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= vb.values()[i];
  return push(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) {
      Matrix ga = g;
      for (std::size_t i = 0; i < ga.size(); ++i) ga.values()[i] *= t.value(b).values()[i];
      t.accumulate(a, ga);
    }
    if (t.requires_grad(b)) {
      Matrix gb = g;
      for (std::size_t i = 0; i < gb.size(); ++i) gb.values()[i] *= t.value(a).values()[i];
      t.accumulate(b, gb);
    }
  });
}

Var Tape::scale(Var a, double s) {
  Matrix out = value(a);
  for (double& v : out.values()) v *= s;
  return push(std::move(out), {a}, [a, s](Tape& t, const Matrix& g) {
    Matrix ga = g;
    for (double& v : ga.values()) v *= s;
    t.accumulate(a, ga);
  });
}

Var Tape::add_row(Var x, Var row) {
  const Matrix& vx = value(x);
  const Matrix& vr = value(row);
  if (vr.rows() != 1 || vr.cols() != vx.cols()) {
    throw ShapeError("add_row: " + dims(vx) + " + " + dims(vr));
  }
  Matrix out = vx;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += vr(0, c);
  return push(std::move(out), {x, row}, [x, row](Tape& t, const Matrix& g) {
    t.accumulate(x, g);
    if (t.requires_grad(row)) {
      Matrix gr(1, g.cols());
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) gr(0, c) += g(r, c);
      t.accumulate(row, gr);
    }
  });
}

Var Tape::add_scalar(Var x, Var s) {
  const Matrix& vs = value(s);
  if (vs.rows() != 1 || vs.cols() != 1) throw ShapeError("add_scalar: scalar must be 1x1");
  Matrix out = value(x);
  for (double& v : out.values()) v += vs(0, 0);
  return push(std::move(out), {x, s}, [x, s](Tape& t, const Matrix& g) {
    t.accumulate(x, g);
    if (t.requires_grad(s)) {
      double total = 0.0;
      for (double v : g.values()) total += v;
      t.accumulate(s, Matrix(1, 1, total));
    }
  });
}

Var Tape::relu(Var x) {
  Matrix out = value(x);
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return push(std::move(out), {x}, [x](Tape& t, const Matrix& g) {
    Matrix gx = g;
    const Matrix& vx = t.value(x);
    for (std::size_t i = 0; i < gx.size(); ++i)
      if (!(vx.values()[i] > 0.0)) gx.values()[i] = 0.0;
    t.accumulate(x, gx);
  });
}

Var Tape::sigmoid(Var x) {
  Matrix out = value(x);
  for (double& v : out.values()) v = orvos::sigmoid(v);
  Var y = push(std::move(out), {x}, nullptr);
  if (nodes_[y.id].requires_grad) {
    nodes_[y.id].backprop = [x, y](Tape& t, const Matrix& g) {
      Matrix gx = g;
      const Matrix& vy = t.value(y);
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const double s = vy.values()[i];
        gx.values()[i] *= s * (1.0 - s);
      }
      t.accumulate(x, gx);
    };
  }
  return y;
}

Var Tape::layer_norm(Var x, Var gain, Var bias, double eps) {
  const Matrix& vx = value(x);
  const Matrix& vg = value(gain);
  const Matrix& vb = value(bias);
  const std::size_t n = vx.rows(), d = vx.cols();
  if (vg.rows() != 1 || vg.cols() != d || !vg.same_shape(vb)) {
    throw ShapeError("layer_norm: gain/bias " + dims(vg) + " for input " + dims(vx));
  }
  Matrix xhat(n, d);
  Matrix inv_std(n, 1);
  Matrix out(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    double mu = 0.0;
    for (std::size_t c = 0; c < d; ++c) mu += vx(r, c);
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) var += (vx(r, c) - mu) * (vx(r, c) - mu);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std(r, 0) = inv;
    for (std::size_t c = 0; c < d; ++c) {
      xhat(r, c) = (vx(r, c) - mu) * inv;
      out(r, c) = xhat(r, c) * vg(0, c) + vb(0, c);
    }
  }
  return push(std::move(out), {x, gain, bias},
              [x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std)](
                  Tape& t, const Matrix& g) {
                const std::size_t n = g.rows(), d = g.cols();
                const Matrix& vg = t.value(gain);
                if (t.requires_grad(gain) || t.requires_grad(bias)) {
                  Matrix gg(1, d), gb(1, d);
                  for (std::size_t r = 0; r < n; ++r)
                    for (std::size_t c = 0; c < d; ++c) {
                      gg(0, c) += g(r, c) * xhat(r, c);
                      gb(0, c) += g(r, c);
                    }
                  t.accumulate(gain, gg);
                  t.accumulate(bias, gb);
                }
                if (t.requires_grad(x)) {
                  Matrix gx(n, d);
                  const double inv_d = 1.0 / static_cast<double>(d);
                  for (std::size_t r = 0; r < n; ++r) {
                    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
                    for (std::size_t c = 0; c < d; ++c) {
                      const double dxh = g(r, c) * vg(0, c);
                      mean_dxhat += dxh;
                      mean_dxhat_xhat += dxh * xhat(r, c);
                    }
                    mean_dxhat *= inv_d;
                    mean_dxhat_xhat *= inv_d;
                    for (std::size_t c = 0; c < d; ++c) {
                      const double dxh = g(r, c) * vg(0, c);
                      gx(r, c) = inv_std(r, 0) * (dxh - mean_dxhat - xhat(r, c) * mean_dxhat_xhat);
                    }
                  }
                  t.accumulate(x, gx);
                }
              });
}

Var Tape::softmax_rows(Var x) {
  const Matrix& vx = value(x);
  Matrix out(vx.rows(), vx.cols());
  for (std::size_t r = 0; r < vx.rows(); ++r) {
    const Vector s = orvos::softmax(vx.row(r));
    std::copy(s.begin(), s.end(), out.row(r).begin());
  }
  Var y = push(std::move(out), {x}, nullptr);
  if (nodes_[y.id].requires_grad) {
    nodes_[y.id].backprop = [x, y](Tape& t, const Matrix& g) {
      const Matrix& vy = t.value(y);
      Matrix gx(vy.rows(), vy.cols());
      for (std::size_t r = 0; r < vy.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < vy.cols(); ++c) dot += g(r, c) * vy(r, c);
        for (std::size_t c = 0; c < vy.cols(); ++c) gx(r, c) = vy(r, c) * (g(r, c) - dot);
      }
      t.accumulate(x, gx);
    };
  }
  return y;
}

Var Tape::transpose(Var x) {
  return push(orvos::transpose(value(x)), {x},
              [x](Tape& t, const Matrix& g) { t.accumulate(x, orvos::transpose(g)); });
}

Var Tape::slice_rows(Var x, std::size_t begin, std::size_t count) {
  const Matrix& vx = value(x);
  Matrix out = orvos::slice_rows(vx, begin, count);
  const std::size_t rows = vx.rows();
  return push(std::move(out), {x}, [x, begin, rows](Tape& t, const Matrix& g) {
    Matrix gx(rows, g.cols());
    std::copy(g.values().begin(), g.values().end(), gx.data() + begin * g.cols());
    t.accumulate(x, gx);
  });
}

Var Tape::slice_cols(Var x, std::size_t begin, std::size_t count) {
  const Matrix& vx = value(x);
  if (begin + count > vx.cols()) throw ShapeError("slice_cols: out of range for " + dims(vx));
  Matrix out(vx.rows(), count);
  for (std::size_t r = 0; r < vx.rows(); ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = vx(r, begin + c);
  const std::size_t cols = vx.cols();
  return push(std::move(out), {x}, [x, begin, cols](Tape& t, const Matrix& g) {
    Matrix gx(g.rows(), cols);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) gx(r, begin + c) = g(r, c);
    t.accumulate(x, gx);
  });
}

Var Tape::concat_rows(std::span<const Var> parts) {
  std::vector<Matrix> values;
  values.reserve(parts.size());
  bool needs = false;
  for (Var p : parts) {
    values.push_back(value(p));
    needs = needs || (recording_ && requires_grad(p));
  }
  Matrix out = orvos::concat_rows(values);
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push(std::move(out), needs, [inputs](Tape& t, const Matrix& g) {
    std::size_t offset = 0;
    for (Var p : inputs) {
      const std::size_t r = t.value(p).rows();
      if (r > 0 && t.requires_grad(p)) t.accumulate(p, orvos::slice_rows(g, offset, r));
      offset += r;
    }
  });
}

Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) return constant(Matrix());
  const std::size_t rows = value(parts.front()).rows();
  std::size_t cols = 0;
  bool needs = false;
  for (Var p : parts) {
    if (value(p).rows() != rows) throw ShapeError("concat_cols: row mismatch");
    cols += value(p).cols();
    needs = needs || (recording_ && requires_grad(p));
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (Var p : parts) {
    const Matrix& v = value(p);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < v.cols(); ++c) out(r, offset + c) = v(r, c);
    offset += v.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push(std::move(out), needs, [inputs](Tape& t, const Matrix& g) {
    std::size_t off = 0;
    for (Var p : inputs) {
      const std::size_t c = t.value(p).cols();
      if (t.requires_grad(p)) {
        Matrix gp(g.rows(), c);
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t j = 0; j < c; ++j) gp(r, j) = g(r, off + j);
        t.accumulate(p, gp);
      }
      off += c;
    }
  });
}

Var Tape::gather_rows(Var x, std::span<const std::size_t> indices) {
  const Matrix& vx = value(x);
  Matrix out(indices.size(), vx.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= vx.rows()) throw ShapeError("gather_rows: index out of range");
    std::copy(vx.row(indices[i]).begin(), vx.row(indices[i]).end(), out.row(i).begin());
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  const std::size_t rows = vx.rows();
  return push(std::move(out), {x}, [x, idx = std::move(idx), rows](Tape& t, const Matrix& g) {
    Matrix gx(rows, g.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t c = 0; c < g.cols(); ++c) gx(idx[i], c) += g(i, c);
    t.accumulate(x, gx);
  });
}

Var Tape::sum(Var x) {
  double total = 0.0;
  for (double v : value(x).values()) total += v;
  const std::size_t r = value(x).rows(), c = value(x).cols();
  return push(Matrix(1, 1, total), {x},
              [x, r, c](Tape& t, const Matrix& g) { t.accumulate(x, Matrix(r, c, g(0, 0))); });
}

Var Tape::mean(Var x) {
  const std::size_t n = value(x).size();
  if (n == 0) throw InvalidArgument("mean: empty input");
  return scale(sum(x), 1.0 / static_cast<double>(n));
}

Var Tape::cosine_rows(Var rows, Var target) {
  const Matrix& s = value(rows);
  const Matrix& g = value(target);
  if (g.rows() != 1 || s.cols() != g.cols()) {
    throw ShapeError("cosine_rows: rows " + dims(s) + " against target " + dims(g));
  }
  Matrix out(s.rows(), 1);
  for (std::size_t i = 0; i < s.rows(); ++i) out(i, 0) = cosine_similarity(s.row(i), g.row(0));
  Var y = push(std::move(out), {rows, target}, nullptr);
  if (nodes_[y.id].requires_grad) {
    nodes_[y.id].backprop = [rows, target, y](Tape& t, const Matrix& gy) {
      const Matrix& s = t.value(rows);
      const Matrix& g = t.value(target);
      const Matrix& cosv = t.value(y);
      const std::size_t d = g.cols();
      double ng = 0.0;
      for (double v : g.values()) ng += v * v;
      ng = std::sqrt(ng);
      Matrix gs(s.rows(), d);
      Matrix gg(1, d);
      if (ng >= kZeroNorm) {
        for (std::size_t i = 0; i < s.rows(); ++i) {
          double ns = 0.0;
          for (std::size_t c = 0; c < d; ++c) ns += s(i, c) * s(i, c);
          ns = std::sqrt(ns);
          if (ns < kZeroNorm) continue;
          const double cosine = cosv(i, 0);
          const double w = gy(i, 0);
          for (std::size_t c = 0; c < d; ++c) {
            gs(i, c) += w * (g(0, c) / (ns * ng) - cosine * s(i, c) / (ns * ns));
            gg(0, c) += w * (s(i, c) / (ns * ng) - cosine * g(0, c) / (ng * ng));
          }
        }
      }
      t.accumulate(rows, gs);
      t.accumulate(target, gg);
    };
  }
  return y;
}

Var Tape::attach_scalar(Var input, double value_, Matrix dvalue_dinput) {
  require_same(value(input), dvalue_dinput, "attach_scalar");
  return push(Matrix(1, 1, value_), {input},
              [input, d = std::move(dvalue_dinput)](Tape& t, const Matrix& g) {
                Matrix gx = d;
                for (double& v : gx.values()) v *= g(0, 0);
                t.accumulate(input, gx);
              });
}

}  // namespace orvos
