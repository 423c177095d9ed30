// Copyright 2026 The CEGI Authors
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

#include "cegi/numerics/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cegi {
namespace {

using internal::Node;

Node& Parent(Node& self, size_t i) { return *self.parents[i]; }

std::string Describe(const Tensor& t) { return ShapeToString(t.shape()); }

void RequireMatrix(const Tensor& x, const char* op) {
  if (!x.defined() || x.rank() > 2) {
    throw ShapeError(std::string(op) + ": expected a matrix, got " +
                     (x.defined() ? Describe(x) : std::string("<empty>")));
  }
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  RequireMatrix(a, "matmul");
  RequireMatrix(b, "matmul");
  const int64_t p = a.rows(), q = a.cols(), r = b.cols();
  if (b.rows() != q) {
    throw ShapeError("matmul: inner extents differ, " + Describe(a) + " x " +
                     Describe(b));
  }
  std::vector<double> out(p * r, 0.0);
  const double* av = a.values().data();
  const double* bv = b.values().data();
  for (int64_t i = 0; i < p; ++i) {
    double* orow = out.data() + i * r;
    for (int64_t k = 0; k < q; ++k) {
      const double aik = av[i * q + k];
      const double* brow = bv + k * r;
      for (int64_t j = 0; j < r; ++j) orow[j] += aik * brow[j];
    }
  }
  return MakeResult({p, r}, std::move(out), {a, b}, "matmul",
                    [p, q, r](Node& self) {
                      Node& na = Parent(self, 0);
                      Node& nb = Parent(self, 1);
                      const double* g = self.grad.data();
                      if (na.requires_grad) {
                        for (int64_t i = 0; i < p; ++i) {
                          for (int64_t k = 0; k < q; ++k) {
                            const double* brow = nb.value.data() + k * r;
                            const double* grow = g + i * r;
                            double acc = 0.0;
                            for (int64_t j = 0; j < r; ++j) {
                              acc += grow[j] * brow[j];
                            }
                            na.grad[i * q + k] += acc;
                          }
                        }
                      }
                      if (nb.requires_grad) {
                        for (int64_t i = 0; i < p; ++i) {
                          const double* grow = g + i * r;
                          for (int64_t k = 0; k < q; ++k) {
                            const double aik = na.value[i * q + k];
                            double* gb = nb.grad.data() + k * r;
                            for (int64_t j = 0; j < r; ++j) {
                              gb[j] += aik * grow[j];
                            }
                          }
                        }
                      }
                    });
}

Tensor Transpose(const Tensor& x) {
  RequireMatrix(x, "transpose");
  const int64_t r = x.rows(), c = x.cols();
  std::vector<double> out(r * c);
  const double* v = x.values().data();
  for (int64_t i = 0; i < r; ++i) {
    for (int64_t j = 0; j < c; ++j) out[j * r + i] = v[i * c + j];
  }
  return MakeResult({c, r}, std::move(out), {x}, "transpose",
                    [r, c](Node& self) {
                      Node& nx = Parent(self, 0);
                      for (int64_t i = 0; i < r; ++i) {
                        for (int64_t j = 0; j < c; ++j) {
                          nx.grad[i * c + j] += self.grad[j * r + i];
                        }
                      }
                    });
}

Tensor Elementwise(const Tensor& a, const Tensor& b, ElementwiseKind kind) {
  if (a.shape() != b.shape()) {
    throw ShapeError("elementwise: shape mismatch " + Describe(a) + " vs " +
                     Describe(b));
  }
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(av.size());
  switch (kind) {
    case ElementwiseKind::kAdd:
      for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
      break;
    case ElementwiseKind::kSubtract:
      for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
      break;
    case ElementwiseKind::kMultiply:
      for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
      break;
  }
  const char* name = kind == ElementwiseKind::kAdd        ? "add"
                     : kind == ElementwiseKind::kSubtract ? "subtract"
                                                          : "multiply";
  return MakeResult(a.shape(), std::move(out), {a, b}, name,
                    [kind](Node& self) {
                      Node& na = Parent(self, 0);
                      Node& nb = Parent(self, 1);
                      const size_t n = self.grad.size();
                      for (size_t i = 0; i < n; ++i) {
                        const double g = self.grad[i];
                        switch (kind) {
                          case ElementwiseKind::kAdd:
                            if (na.requires_grad) na.grad[i] += g;
                            if (nb.requires_grad) nb.grad[i] += g;
                            break;
                          case ElementwiseKind::kSubtract:
                            if (na.requires_grad) na.grad[i] += g;
                            if (nb.requires_grad) nb.grad[i] -= g;
                            break;
                          case ElementwiseKind::kMultiply:
                            if (na.requires_grad) na.grad[i] += g * nb.value[i];
                            if (nb.requires_grad) nb.grad[i] += g * na.value[i];
                            break;
                        }
                      }
                    });
}

Tensor Scale(const Tensor& x, double factor) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (double& v : out) v *= factor;
  return MakeResult(x.shape(), std::move(out), {x}, "scale",
                    [factor](Node& self) {
                      Node& nx = Parent(self, 0);
                      for (size_t i = 0; i < self.grad.size(); ++i) {
                        nx.grad[i] += factor * self.grad[i];
                      }
                    });
}

Tensor AddScalar(const Tensor& x, double offset) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (double& v : out) v += offset;
  return MakeResult(x.shape(), std::move(out), {x}, "add_scalar",
                    [](Node& self) {
                      Node& nx = Parent(self, 0);
                      for (size_t i = 0; i < self.grad.size(); ++i) {
                        nx.grad[i] += self.grad[i];
                      }
                    });
}

Tensor AddConstant(const Tensor& x, std::span<const double> constant) {
  if (static_cast<int64_t>(constant.size()) != x.size()) {
    throw ShapeError("add_constant: " + std::to_string(constant.size()) +
                     " values for tensor " + Describe(x));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  for (size_t i = 0; i < out.size(); ++i) out[i] += constant[i];
  return MakeResult(x.shape(), std::move(out), {x}, "add_constant",
                    [](Node& self) {
                      Node& nx = Parent(self, 0);
                      for (size_t i = 0; i < self.grad.size(); ++i) {
                        nx.grad[i] += self.grad[i];
                      }
                    });
}

Tensor AddBias(const Tensor& x, const Tensor& bias) {
  RequireMatrix(x, "add_bias");
  const int64_t r = x.rows(), c = x.cols();
  if (bias.size() != r) {
    throw ShapeError("add_bias: bias " + Describe(bias) + " for input " +
                     Describe(x));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  const auto bv = bias.values();
  for (int64_t i = 0; i < r; ++i) {
    for (int64_t j = 0; j < c; ++j) out[i * c + j] += bv[i];
  }
  return MakeResult({r, c}, std::move(out), {x, bias}, "add_bias",
                    [r, c](Node& self) {
                      Node& nx = Parent(self, 0);
                      Node& nb = Parent(self, 1);
                      for (int64_t i = 0; i < r; ++i) {
                        double row_sum = 0.0;
                        for (int64_t j = 0; j < c; ++j) {
                          const double g = self.grad[i * c + j];
                          if (nx.requires_grad) nx.grad[i * c + j] += g;
                          row_sum += g;
                        }
                        if (nb.requires_grad) nb.grad[i] += row_sum;
                      }
                    });
}

Tensor Relu(const Tensor& x) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (double& v : out) v = v > 0.0 ? v : 0.0;
  return MakeResult(x.shape(), std::move(out), {x}, "relu", [](Node& self) {
    Node& nx = Parent(self, 0);
    for (size_t i = 0; i < self.grad.size(); ++i) {
      if (nx.value[i] > 0.0) nx.grad[i] += self.grad[i];
    }
  });
}

Tensor Softmax(const Tensor& x, int64_t axis) {
  if (axis < 0 || axis >= x.rank()) {
    throw ShapeError("softmax: axis " + std::to_string(axis) +
                     " out of range for " + Describe(x));
  }
  int64_t outer = 1, inner = 1;
  for (int64_t i = 0; i < axis; ++i) outer *= x.shape()[i];
  for (int64_t i = axis + 1; i < x.rank(); ++i) inner *= x.shape()[i];
  const int64_t n = x.shape()[axis];
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t in = 0; in < inner; ++in) {
      const int64_t base = o * n * inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (int64_t k = 0; k < n; ++k) mx = std::max(mx, xv[base + k * inner]);
      double total = 0.0;
      for (int64_t k = 0; k < n; ++k) {
        const double e = std::exp(xv[base + k * inner] - mx);
        out[base + k * inner] = e;
        total += e;
      }
      for (int64_t k = 0; k < n; ++k) out[base + k * inner] /= total;
    }
  }
  return MakeResult(
      x.shape(), std::move(out), {x}, "softmax",
      [outer, inner, n](Node& self) {
        Node& nx = Parent(self, 0);
        const auto& y = self.value;
        for (int64_t o = 0; o < outer; ++o) {
          for (int64_t in = 0; in < inner; ++in) {
            const int64_t base = o * n * inner + in;
            double dot = 0.0;
            for (int64_t k = 0; k < n; ++k) {
              dot += self.grad[base + k * inner] * y[base + k * inner];
            }
            for (int64_t k = 0; k < n; ++k) {
              const int64_t idx = base + k * inner;
              nx.grad[idx] += y[idx] * (self.grad[idx] - dot);
            }
          }
        }
      });
}

Tensor Sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  return MakeResult({1}, {total}, {x}, "sum", [](Node& self) {
    Node& nx = Parent(self, 0);
    for (double& g : nx.grad) g += self.grad[0];
  });
}

Tensor MaxAll(const Tensor& x) {
  const auto xv = x.values();
  if (xv.empty()) throw ShapeError("max of empty tensor");
  const size_t arg = static_cast<size_t>(
      std::max_element(xv.begin(), xv.end()) - xv.begin());
  return MakeResult({1}, {xv[arg]}, {x}, "max", [arg](Node& self) {
    Parent(self, 0).grad[arg] += self.grad[0];
  });
}

Tensor Norm(const Tensor& x) {
  double sq = 0.0;
  for (double v : x.values()) sq += v * v;
  const double norm = std::sqrt(sq);
  return MakeResult({1}, {norm}, {x}, "norm", [norm](Node& self) {
    if (norm == 0.0) return;
    Node& nx = Parent(self, 0);
    const double g = self.grad[0] / norm;
    for (size_t i = 0; i < nx.grad.size(); ++i) nx.grad[i] += g * nx.value[i];
  });
}

Tensor Squash(const Tensor& s) {
  double sq = 0.0;
  for (double v : s.values()) sq += v * v;
  const double norm = std::sqrt(sq);
  std::vector<double> out(s.values().begin(), s.values().end());
  // v = (n^2 / (1 + n^2)) * s / n; the origin maps to itself.
  const double factor = norm == 0.0 ? 0.0 : (sq / (1.0 + sq)) / norm;
  for (double& v : out) v *= factor;
  return MakeResult(
      s.shape(), std::move(out), {s}, "squash", [norm, sq, factor](Node& self) {
        if (norm == 0.0) return;
        Node& ns = Parent(self, 0);
        // Jacobian: factor * I + (1 - n^2) / ((1 + n^2)^2 n) * s s^T.
        const double coupling =
            (1.0 - sq) / ((1.0 + sq) * (1.0 + sq) * norm);
        double s_dot_g = 0.0;
        for (size_t i = 0; i < ns.value.size(); ++i) {
          s_dot_g += ns.value[i] * self.grad[i];
        }
        for (size_t i = 0; i < ns.grad.size(); ++i) {
          ns.grad[i] += factor * self.grad[i] +
                        coupling * ns.value[i] * s_dot_g;
        }
      });
}

Tensor SliceRows(const Tensor& x, int64_t begin, int64_t count) {
  RequireMatrix(x, "slice_rows");
  const int64_t r = x.rows(), c = x.cols();
  if (begin < 0 || count < 0 || begin + count > r) {
    throw ShapeError("slice_rows [" + std::to_string(begin) + ", +" +
                     std::to_string(count) + ") out of range for " +
                     Describe(x));
  }
  const auto xv = x.values();
  std::vector<double> out(xv.begin() + begin * c,
                          xv.begin() + (begin + count) * c);
  return MakeResult({count, c}, std::move(out), {x}, "slice_rows",
                    [begin, c](Node& self) {
                      Node& nx = Parent(self, 0);
                      for (size_t i = 0; i < self.grad.size(); ++i) {
                        nx.grad[begin * c + i] += self.grad[i];
                      }
                    });
}

Tensor SliceCols(const Tensor& x, int64_t begin, int64_t count) {
  RequireMatrix(x, "slice_cols");
  const int64_t r = x.rows(), c = x.cols();
  if (begin < 0 || count < 0 || begin + count > c) {
    throw ShapeError("slice_cols [" + std::to_string(begin) + ", +" +
                     std::to_string(count) + ") out of range for " +
                     Describe(x));
  }
  const auto xv = x.values();
  std::vector<double> out(r * count);
  for (int64_t i = 0; i < r; ++i) {
    std::copy(xv.begin() + i * c + begin, xv.begin() + i * c + begin + count,
              out.begin() + i * count);
  }
  return MakeResult({r, count}, std::move(out), {x}, "slice_cols",
                    [r, c, begin, count](Node& self) {
                      Node& nx = Parent(self, 0);
                      for (int64_t i = 0; i < r; ++i) {
                        for (int64_t j = 0; j < count; ++j) {
                          nx.grad[i * c + begin + j] +=
                              self.grad[i * count + j];
                        }
                      }
                    });
}

Tensor ConcatRows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_rows of nothing");
  const int64_t c = parts[0].cols();
  int64_t r = 0;
  std::vector<double> out;
  for (const Tensor& p : parts) {
    RequireMatrix(p, "concat_rows");
    if (p.cols() != c) {
      throw ShapeError("concat_rows: column mismatch " + Describe(parts[0]) +
                       " vs " + Describe(p));
    }
    r += p.rows();
    out.insert(out.end(), p.values().begin(), p.values().end());
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return MakeResult({r, c}, std::move(out), std::move(inputs), "concat_rows",
                    [](Node& self) {
                      size_t offset = 0;
                      for (auto& parent : self.parents) {
                        const size_t n = parent->value.size();
                        if (parent->requires_grad) {
                          for (size_t i = 0; i < n; ++i) {
                            parent->grad[i] += self.grad[offset + i];
                          }
                        }
                        offset += n;
                      }
                    });
}

Tensor ConcatCols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_cols of nothing");
  const int64_t r = parts[0].rows();
  int64_t c = 0;
  for (const Tensor& p : parts) {
    RequireMatrix(p, "concat_cols");
    if (p.rows() != r) {
      throw ShapeError("concat_cols: row mismatch " + Describe(parts[0]) +
                       " vs " + Describe(p));
    }
    c += p.cols();
  }
  std::vector<double> out(r * c);
  int64_t offset = 0;
  for (const Tensor& p : parts) {
    const int64_t pc = p.cols();
    const auto pv = p.values();
    for (int64_t i = 0; i < r; ++i) {
      std::copy(pv.begin() + i * pc, pv.begin() + (i + 1) * pc,
                out.begin() + i * c + offset);
    }
    offset += pc;
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return MakeResult({r, c}, std::move(out), std::move(inputs), "concat_cols",
                    [r, c](Node& self) {
                      int64_t col = 0;
                      for (auto& parent : self.parents) {
                        const int64_t pc =
                            r == 0 ? 0
                                   : static_cast<int64_t>(
                                         parent->value.size()) / r;
                        if (parent->requires_grad) {
                          for (int64_t i = 0; i < r; ++i) {
                            for (int64_t j = 0; j < pc; ++j) {
                              parent->grad[i * pc + j] +=
                                  self.grad[i * c + col + j];
                            }
                          }
                        }
                        col += pc;
                      }
                    });
}

Tensor GatherCols(const Tensor& table, std::span<const int64_t> ids) {
  RequireMatrix(table, "gather_cols");
  const int64_t d = table.rows(), v = table.cols();
  const int64_t n = static_cast<int64_t>(ids.size());
  for (int64_t id : ids) {
    if (id < 0 || id >= v) {
      throw std::out_of_range("gather_cols: id " + std::to_string(id) +
                              " outside table of width " + std::to_string(v));
    }
  }
  const auto tv = table.values();
  std::vector<double> out(d * n);
  for (int64_t i = 0; i < d; ++i) {
    for (int64_t j = 0; j < n; ++j) out[i * n + j] = tv[i * v + ids[j]];
  }
  std::vector<int64_t> saved(ids.begin(), ids.end());
  return MakeResult({d, n}, std::move(out), {table}, "gather_cols",
                    [d, v, n, saved = std::move(saved)](Node& self) {
                      Node& nt = Parent(self, 0);
                      for (int64_t i = 0; i < d; ++i) {
                        for (int64_t j = 0; j < n; ++j) {
                          nt.grad[i * v + saved[j]] += self.grad[i * n + j];
                        }
                      }
                    });
}

Tensor LayerNormCols(const Tensor& x, const Tensor& gain, const Tensor& shift,
                     double epsilon) {
  RequireMatrix(x, "layer_norm");
  const int64_t r = x.rows(), c = x.cols();
  if (gain.size() != r || shift.size() != r) {
    throw ShapeError("layer_norm: gain " + Describe(gain) + "/shift " +
                     Describe(shift) + " for input " + Describe(x));
  }
  const auto xv = x.values();
  const auto gv = gain.values();
  const auto bv = shift.values();
  std::vector<double> normalized(r * c);
  std::vector<double> inv_std(c);
  std::vector<double> out(r * c);
  for (int64_t j = 0; j < c; ++j) {
    double mean = 0.0;
    for (int64_t i = 0; i < r; ++i) mean += xv[i * c + j];
    mean /= static_cast<double>(r);
    double var = 0.0;
    for (int64_t i = 0; i < r; ++i) {
      const double dev = xv[i * c + j] - mean;
      var += dev * dev;
    }
    var /= static_cast<double>(r);
    const double inv = 1.0 / std::sqrt(var + epsilon);
    inv_std[j] = inv;
    for (int64_t i = 0; i < r; ++i) {
      const double xhat = (xv[i * c + j] - mean) * inv;
      normalized[i * c + j] = xhat;
      out[i * c + j] = gv[i] * xhat + bv[i];
    }
  }
  return MakeResult(
      {r, c}, std::move(out), {x, gain, shift}, "layer_norm",
      [r, c, normalized = std::move(normalized),
       inv_std = std::move(inv_std)](Node& self) {
        Node& nx = Parent(self, 0);
        Node& ng = Parent(self, 1);
        Node& nb = Parent(self, 2);
        const double rn = static_cast<double>(r);
        for (int64_t j = 0; j < c; ++j) {
          double sum_g = 0.0, sum_gx = 0.0;
          for (int64_t i = 0; i < r; ++i) {
            const double g = self.grad[i * c + j];
            const double xhat = normalized[i * c + j];
            if (ng.requires_grad) ng.grad[i] += g * xhat;
            if (nb.requires_grad) nb.grad[i] += g;
            const double gh = g * ng.value[i];
            sum_g += gh;
            sum_gx += gh * xhat;
          }
          if (!nx.requires_grad) continue;
          for (int64_t i = 0; i < r; ++i) {
            const double gh = self.grad[i * c + j] * ng.value[i];
            const double xhat = normalized[i * c + j];
            nx.grad[i * c + j] +=
                inv_std[j] / rn * (rn * gh - sum_g - xhat * sum_gx);
          }
        }
      });
}

Tensor CrossEntropyCols(const Tensor& logits,
                        std::span<const int64_t> targets) {
  RequireMatrix(logits, "cross_entropy");
  const int64_t classes = logits.rows(), c = logits.cols();
  if (static_cast<int64_t>(targets.size()) != c) {
    throw ShapeError("cross_entropy: " + std::to_string(targets.size()) +
                     " targets for logits " + Describe(logits));
  }
  const auto lv = logits.values();
  std::vector<double> probs(classes * c, 0.0);
  double loss = 0.0;
  for (int64_t j = 0; j < c; ++j) {
    if (targets[j] < 0) continue;
    if (targets[j] >= classes) {
      throw std::out_of_range("cross_entropy: target " +
                              std::to_string(targets[j]) + " >= " +
                              std::to_string(classes));
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (int64_t i = 0; i < classes; ++i) mx = std::max(mx, lv[i * c + j]);
    double total = 0.0;
    for (int64_t i = 0; i < classes; ++i) {
      const double e = std::exp(lv[i * c + j] - mx);
      probs[i * c + j] = e;
      total += e;
    }
    for (int64_t i = 0; i < classes; ++i) probs[i * c + j] /= total;
    loss += -(lv[targets[j] * c + j] - mx - std::log(total));
  }
  std::vector<int64_t> saved(targets.begin(), targets.end());
  return MakeResult(
      {1}, {loss}, {logits}, "cross_entropy",
      [classes, c, probs = std::move(probs),
       saved = std::move(saved)](Node& self) {
        Node& nl = Parent(self, 0);
        const double g = self.grad[0];
        for (int64_t j = 0; j < c; ++j) {
          if (saved[j] < 0) continue;
          for (int64_t i = 0; i < classes; ++i) {
            const double onehot = i == saved[j] ? 1.0 : 0.0;
            nl.grad[i * c + j] += g * (probs[i * c + j] - onehot);
          }
        }
      });
}

Tensor Unfold(const Tensor& x, int64_t width) {
  RequireMatrix(x, "unfold");
  const int64_t d = x.rows(), w = x.cols();
  if (width < 1 || w % width != 0) {
    throw ShapeError("unfold: width " + std::to_string(w) +
                     " is not divisible by window " + std::to_string(width));
  }
  const int64_t windows = w / width;
  const auto xv = x.values();
  std::vector<double> out(d * width * windows);
  for (int64_t k = 0; k < width; ++k) {
    for (int64_t r = 0; r < d; ++r) {
      for (int64_t col = 0; col < windows; ++col) {
        out[(k * d + r) * windows + col] = xv[r * w + col * width + k];
      }
    }
  }
  return MakeResult({d * width, windows}, std::move(out), {x}, "unfold",
                    [d, w, width, windows](Node& self) {
                      Node& nx = Parent(self, 0);
                      for (int64_t k = 0; k < width; ++k) {
                        for (int64_t r = 0; r < d; ++r) {
                          for (int64_t col = 0; col < windows; ++col) {
                            nx.grad[r * w + col * width + k] +=
                                self.grad[(k * d + r) * windows + col];
                          }
                        }
                      }
                    });
}

Tensor WindowedConv(const Tensor& x, int64_t width, int64_t stride,
                    const Tensor& kernel, const Tensor& bias) {
  RequireMatrix(x, "windowed_conv");
  RequireMatrix(kernel, "windowed_conv");
  if (width != stride || width < 1) {
    throw ShapeError("windowed_conv: only non-overlapping windows "
                     "(width == stride) are supported, got width " +
                     std::to_string(width) + " stride " +
                     std::to_string(stride));
  }
  if (x.cols() % stride != 0) {
    throw ShapeError("windowed_conv: input " + Describe(x) +
                     " width is not divisible by stride " +
                     std::to_string(stride));
  }
  if (kernel.cols() != x.rows() * width) {
    throw ShapeError("windowed_conv: kernel " + Describe(kernel) +
                     " does not match input " + Describe(x) + " with width " +
                     std::to_string(width));
  }
  Tensor out = MatMul(kernel, Unfold(x, width));
  if (bias.defined()) out = AddBias(out, bias);
  return out;
}

Tensor MaxPool(const Tensor& x, int64_t width, int64_t stride) {
  RequireMatrix(x, "max_pool");
  if (width != stride || width < 1) {
    throw ShapeError("max_pool: only width == stride is supported, got width " +
                     std::to_string(width) + " stride " +
                     std::to_string(stride));
  }
  const int64_t d = x.rows(), w = x.cols();
  if (w % stride != 0) {
    throw ShapeError("max_pool: input " + Describe(x) +
                     " width is not divisible by stride " +
                     std::to_string(stride));
  }
  const int64_t windows = w / stride;
  const auto xv = x.values();
  std::vector<double> out(d * windows);
  std::vector<int64_t> argmax(d * windows);
  for (int64_t r = 0; r < d; ++r) {
    for (int64_t col = 0; col < windows; ++col) {
      int64_t best = r * w + col * stride;
      for (int64_t k = 1; k < width; ++k) {
        const int64_t idx = r * w + col * stride + k;
        if (xv[idx] > xv[best]) best = idx;
      }
      out[r * windows + col] = xv[best];
      argmax[r * windows + col] = best;
    }
  }
  return MakeResult({d, windows}, std::move(out), {x}, "max_pool",
                    [argmax = std::move(argmax)](Node& self) {
                      Node& nx = Parent(self, 0);
                      for (size_t i = 0; i < argmax.size(); ++i) {
                        nx.grad[argmax[i]] += self.grad[i];
                      }
                    });
}

}  // namespace cegi
