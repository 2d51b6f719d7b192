#include "gdpnet/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gdpnet/errors.hpp"
#include "gdpnet/kernels.hpp"

namespace gdpnet {

namespace numeric {

double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sum_exp(std::span<const double> xs) noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

DenseArray softplus(const DenseArray& x) {
  DenseArray y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = softplus(x[i]);
  return y;
}

DenseArray row_softmax(const DenseArray& x) {
  if (x.rank() != 2) throw DimensionError("row_softmax needs a matrix, got " + shape_string(x.shape()));
  DenseArray y(x.shape());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto in = x.row(r);
    auto out = y.row(r);
    const double m = *std::max_element(in.begin(), in.end());
    double s = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      out[c] = std::exp(in[c] - m);
      s += out[c];
    }
    for (auto& v : out) v /= s;
  }
  return y;
}

double cross_entropy(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) {
    throw IndexError("label " + std::to_string(label) + " out of range for " +
                     std::to_string(logits.size()) + " classes");
  }
  // Shift by the label logit; when it is the largest, log1p keeps the
  // tiny losses of confident predictions accurate.
  const double ref = logits[label];
  double top = 0.0;
  for (double x : logits) top = std::max(top, x - ref);
  if (top == 0.0) {
    double rest = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
      if (j != label) rest += std::exp(logits[j] - ref);
    }
    return std::log1p(rest);
  }
  return log_sum_exp(logits) - ref;
}

}  // namespace numeric

namespace ops {
namespace {

void require_matrix(const Var& v, const char* op) {
  if (v.value().rank() != 2) {
    throw DimensionError(std::string(op) + " needs a matrix, got " + shape_string(v.shape()));
  }
}

[[noreturn]] void shape_error(const char* op, const Var& a, const Var& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape_string(a.shape()) +
                       " and " + shape_string(b.shape()));
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) shape_error("matmul", a, b);
  DenseArray out({m, n});
  kernels::gemm_nn(m, n, k, a.value().data(), b.value().data(), out.data());
  const bool rg = a.requires_grad() || b.requires_grad();
  return a.tape().record(std::move(out), rg, [a, b, m, n, k](Tape& t, const DenseArray& g) {
    if (a.requires_grad()) kernels::gemm_nt(m, k, n, g.data(), b.value().data(), t.grad(a).data());
    if (b.requires_grad()) kernels::gemm_tn(k, n, m, a.value().data(), g.data(), t.grad(b).data());
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  if (b.cols() != k) shape_error("matmul_nt", a, b);
  DenseArray out({m, n});
  kernels::gemm_nt(m, n, k, a.value().data(), b.value().data(), out.data());
  const bool rg = a.requires_grad() || b.requires_grad();
  return a.tape().record(std::move(out), rg, [a, b, m, n, k](Tape& t, const DenseArray& g) {
    if (a.requires_grad()) kernels::gemm_nn(m, k, n, g.data(), b.value().data(), t.grad(a).data());
    if (b.requires_grad()) kernels::gemm_tn(n, k, m, g.data(), a.value().data(), t.grad(b).data());
  });
}

Var add_row_bias(const Var& x, const Var& bias) {
  require_matrix(x, "add_row_bias");
  const std::size_t m = x.rows(), n = x.cols();
  if (bias.value().size() != n) shape_error("add_row_bias", x, bias);
  DenseArray out = x.value();
  const auto& b = bias.value();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) += b[j];
  }
  const bool rg = x.requires_grad() || bias.requires_grad();
  return x.tape().record(std::move(out), rg, [x, bias, m, n](Tape& t, const DenseArray& g) {
    if (x.requires_grad()) {
      auto& gx = t.grad(x);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    }
    if (bias.requires_grad()) {
      const double factor = 1.0 + testing::backward_perturbation();
      auto& gb = t.grad(bias);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) gb[j] += factor * g.at(i, j);
      }
    }
  });
}

Var linear(const Var& x, const Var& w, const Var& b) {
  require_matrix(x, "linear");
  require_matrix(w, "linear");
  if (x.cols() != w.rows()) shape_error("linear", x, w);
  if (b.value().size() != w.cols()) shape_error("linear", w, b);
  return add_row_bias(matmul(x, w), b);
}

Var add(const Var& a, const Var& b) {
  if (!a.value().same_shape(b.value())) shape_error("add", a, b);
  DenseArray out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  const bool rg = a.requires_grad() || b.requires_grad();
  return a.tape().record(std::move(out), rg, [a, b](Tape& t, const DenseArray& g) {
    for (const Var* v : {&a, &b}) {
      if (!v->requires_grad()) continue;
      auto& gv = t.grad(*v);
      for (std::size_t i = 0; i < g.size(); ++i) gv[i] += g[i];
    }
  });
}

Var scale(const Var& a, double s) {
  DenseArray out = a.value();
  for (auto& v : out.values()) v *= s;
  return a.tape().record(std::move(out), a.requires_grad(), [a, s](Tape& t, const DenseArray& g) {
    auto& ga = t.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
  });
}

Var mul_constant(const Var& a, const DenseArray& c) {
  if (!a.value().same_shape(c)) {
    throw DimensionError("mul_constant: incompatible shapes " + shape_string(a.shape()) + " and " +
                         shape_string(c.shape()));
  }
  DenseArray out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c[i];
  return a.tape().record(std::move(out), a.requires_grad(), [a, c](Tape& t, const DenseArray& g) {
    auto& ga = t.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += c[i] * g[i];
  });
}

Var relu(const Var& x) {
  const auto& xv = x.value();
  std::vector<std::size_t> on(xv.size());
  for (std::size_t i = 0; i < on.size(); ++i) on[i] = xv[i] > 0.0;
  if (auto* log = x.tape().branch_log()) on = log->decide(std::move(on));
  DenseArray out = xv;
  for (std::size_t i = 0; i < on.size(); ++i) {
    if (!on[i]) out[i] = 0.0;
  }
  return x.tape().record(std::move(out), x.requires_grad(),
                         [x, on = std::move(on)](Tape& t, const DenseArray& g) {
                           auto& gx = t.grad(x);
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             if (on[i]) gx[i] += g[i];
                           }
                         });
}

Var tanh(const Var& x) {
  DenseArray out = x.value();
  for (auto& v : out.values()) v = std::tanh(v);
  DenseArray saved = out;
  return x.tape().record(std::move(out), x.requires_grad(),
                         [x, saved = std::move(saved)](Tape& t, const DenseArray& g) {
                           auto& gx = t.grad(x);
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             gx[i] += g[i] * (1.0 - saved[i] * saved[i]);
                           }
                         });
}

Var softplus(const Var& x) {
  return x.tape().record(numeric::softplus(x.value()), x.requires_grad(),
                         [x](Tape& t, const DenseArray& g) {
                           auto& gx = t.grad(x);
                           const auto& xv = x.value();
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             gx[i] += g[i] * numeric::sigmoid(xv[i]);
                           }
                         });
}

Var row_softmax(const Var& x) {
  require_matrix(x, "row_softmax");
  DenseArray y = numeric::row_softmax(x.value());
  DenseArray saved = y;
  return x.tape().record(std::move(y), x.requires_grad(),
                         [x, saved = std::move(saved)](Tape& t, const DenseArray& g) {
                           auto& gx = t.grad(x);
                           for (std::size_t r = 0; r < saved.rows(); ++r) {
                             const auto yr = saved.row(r);
                             const auto gr = g.row(r);
                             double inner = 0.0;
                             for (std::size_t c = 0; c < yr.size(); ++c) inner += gr[c] * yr[c];
                             auto out = gx.row(r);
                             for (std::size_t c = 0; c < yr.size(); ++c) {
                               out[c] += yr[c] * (gr[c] - inner);
                             }
                           }
                         });
}

Var row_normalize(const Var& x) {
  require_matrix(x, "row_normalize");
  const auto& xv = x.value();
  DenseArray y(xv.shape());
  std::vector<double> sums(xv.rows());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    double s = 0.0;
    for (double v : xv.row(r)) s += v;
    if (!(s > 0.0)) throw NumericError("row_normalize: row " + std::to_string(r) + " has non-positive sum");
    sums[r] = s;
    auto out = y.row(r);
    const auto in = xv.row(r);
    for (std::size_t c = 0; c < in.size(); ++c) out[c] = in[c] / s;
  }
  DenseArray saved = y;
  return x.tape().record(
      std::move(y), x.requires_grad(),
      [x, saved = std::move(saved), sums = std::move(sums)](Tape& t, const DenseArray& g) {
        auto& gx = t.grad(x);
        for (std::size_t r = 0; r < saved.rows(); ++r) {
          const auto yr = saved.row(r);
          const auto gr = g.row(r);
          double inner = 0.0;
          for (std::size_t c = 0; c < yr.size(); ++c) inner += gr[c] * yr[c];
          auto out = gx.row(r);
          for (std::size_t c = 0; c < yr.size(); ++c) out[c] += (gr[c] - inner) / sums[r];
        }
      });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols of zero parts");
  const std::size_t m = parts.front().rows();
  std::size_t n = 0;
  bool rg = false;
  for (const auto& p : parts) {
    require_matrix(p, "concat_cols");
    if (p.rows() != m) shape_error("concat_cols", parts.front(), p);
    n += p.cols();
    rg = rg || p.requires_grad();
  }
  DenseArray out({m, n});
  std::size_t off = 0;
  for (const auto& p : parts) {
    const auto& pv = p.value();
    for (std::size_t i = 0; i < m; ++i) {
      std::copy(pv.row(i).begin(), pv.row(i).end(), out.row(i).begin() + static_cast<std::ptrdiff_t>(off));
    }
    off += p.cols();
  }
  return parts.front().tape().record(std::move(out), rg, [parts, m, n](Tape& t, const DenseArray& g) {
    std::size_t off = 0;
    for (const auto& p : parts) {
      const std::size_t w = p.cols();
      if (p.requires_grad()) {
        auto& gp = t.grad(p);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < w; ++j) gp.at(i, j) += g[i * n + off + j];
        }
      }
      off += w;
    }
  });
}

Var gather_rows(const Var& x, std::span<const std::size_t> rows) {
  require_matrix(x, "gather_rows");
  const std::size_t n = x.cols();
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  DenseArray out({idx.size(), n});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= x.rows()) throw IndexError("gather_rows: row " + std::to_string(idx[i]) + " out of range");
    std::copy(x.value().row(idx[i]).begin(), x.value().row(idx[i]).end(), out.row(i).begin());
  }
  return x.tape().record(std::move(out), x.requires_grad(),
                         [x, idx = std::move(idx), n](Tape& t, const DenseArray& g) {
                           auto& gx = t.grad(x);
                           for (std::size_t i = 0; i < idx.size(); ++i) {
                             for (std::size_t j = 0; j < n; ++j) gx.at(idx[i], j) += g.at(i, j);
                           }
                         });
}

Var gather_submatrix(const Var& x, std::span<const std::size_t> sel) {
  require_matrix(x, "gather_submatrix");
  std::vector<std::size_t> idx(sel.begin(), sel.end());
  const std::size_t k = idx.size();
  DenseArray out({k, k});
  for (std::size_t i = 0; i < k; ++i) {
    if (idx[i] >= x.rows() || idx[i] >= x.cols()) {
      throw IndexError("gather_submatrix: index " + std::to_string(idx[i]) + " out of range");
    }
    for (std::size_t j = 0; j < k; ++j) out.at(i, j) = x.value().at(idx[i], idx[j]);
  }
  return x.tape().record(std::move(out), x.requires_grad(),
                         [x, idx = std::move(idx), k](Tape& t, const DenseArray& g) {
                           auto& gx = t.grad(x);
                           for (std::size_t i = 0; i < k; ++i) {
                             for (std::size_t j = 0; j < k; ++j) gx.at(idx[i], idx[j]) += g.at(i, j);
                           }
                         });
}

Var gather_elements(const Var& x, std::span<const std::pair<std::size_t, std::size_t>> at) {
  require_matrix(x, "gather_elements");
  std::vector<std::pair<std::size_t, std::size_t>> pos(at.begin(), at.end());
  DenseArray out({pos.size()});
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const auto [r, c] = pos[i];
    if (r >= x.rows() || c >= x.cols()) throw IndexError("gather_elements: position out of range");
    out[i] = x.value().at(r, c);
  }
  return x.tape().record(std::move(out), x.requires_grad(),
                         [x, pos = std::move(pos)](Tape& t, const DenseArray& g) {
                           auto& gx = t.grad(x);
                           for (std::size_t i = 0; i < pos.size(); ++i) {
                             gx.at(pos[i].first, pos[i].second) += g[i];
                           }
                         });
}

Var scale_rows(const Var& x, const Var& gate) {
  require_matrix(x, "scale_rows");
  const std::size_t m = x.rows(), n = x.cols();
  if (gate.value().size() != m) shape_error("scale_rows", x, gate);
  DenseArray out = x.value();
  for (std::size_t i = 0; i < m; ++i) {
    for (auto& v : out.row(i)) v *= gate.value()[i];
  }
  const bool rg = x.requires_grad() || gate.requires_grad();
  return x.tape().record(std::move(out), rg, [x, gate, m, n](Tape& t, const DenseArray& g) {
    if (x.requires_grad()) {
      auto& gx = t.grad(x);
      for (std::size_t i = 0; i < m; ++i) {
        const double s = gate.value()[i];
        for (std::size_t j = 0; j < n; ++j) gx.at(i, j) += s * g.at(i, j);
      }
    }
    if (gate.requires_grad()) {
      auto& gg = t.grad(gate);
      for (std::size_t i = 0; i < m; ++i) {
        gg[i] += kernels::dot(g.row(i).data(), x.value().row(i).data(), n);
      }
    }
  });
}

Var column_max(const Var& x) {
  require_matrix(x, "column_max");
  const std::size_t m = x.rows(), n = x.cols();
  if (m == 0) throw DimensionError("column_max over zero rows");
  DenseArray out({1, n});
  std::vector<std::size_t> arg(n, 0);
  const auto& xv = x.value();
  for (std::size_t j = 0; j < n; ++j) {
    double best = xv.at(0, j);
    for (std::size_t i = 1; i < m; ++i) {
      if (xv.at(i, j) > best) {
        best = xv.at(i, j);
        arg[j] = i;
      }
    }
    out[j] = best;
  }
  if (auto* log = x.tape().branch_log()) {
    arg = log->decide(std::move(arg));
    for (std::size_t j = 0; j < n; ++j) out[j] = xv.at(arg[j], j);
  }
  return x.tape().record(std::move(out), x.requires_grad(),
                         [x, arg = std::move(arg)](Tape& t, const DenseArray& g) {
                           auto& gx = t.grad(x);
                           for (std::size_t j = 0; j < arg.size(); ++j) gx.at(arg[j], j) += g[j];
                         });
}

Var sum(const Var& x) {
  double s = 0.0;
  for (double v : x.value().values()) s += v;
  return x.tape().record(DenseArray::scalar(s), x.requires_grad(), [x](Tape& t, const DenseArray& g) {
    auto& gx = t.grad(x);
    for (auto& v : gx.values()) v += g[0];
  });
}

Var cross_entropy(const Var& logits, std::size_t label) {
  const auto& lv = logits.value();
  const double loss = numeric::cross_entropy(lv.values(), label);
  return logits.tape().record(DenseArray::scalar(loss), logits.requires_grad(),
                              [logits, label](Tape& t, const DenseArray& g) {
                                const auto& lv = logits.value();
                                const double lse = numeric::log_sum_exp(lv.values());
                                auto& gl = t.grad(logits);
                                for (std::size_t i = 0; i < lv.size(); ++i) {
                                  const double p = std::exp(lv[i] - lse);
                                  gl[i] += g[0] * (p - (i == label ? 1.0 : 0.0));
                                }
                              });
}

}  // namespace ops
}  // namespace gdpnet
