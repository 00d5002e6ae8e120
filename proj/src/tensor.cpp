#include "murke/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace murke {

namespace {

thread_local int no_grad_depth = 0;

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

TensorPtr make_node(std::vector<std::size_t> shape, std::vector<TensorPtr> parents) {
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->value.resize(shape_numel(t->shape));
  if (grad_recording()) {
    bool needs = false;
    for (const auto& p : parents) needs = needs || p->requires_grad;
    if (needs) {
      t->requires_grad = true;
      t->parents = std::move(parents);
    }
  }
  return t;
}

void accumulate(Tensor* p, std::size_t idx, double v) {
  p->ensure_grad();
  p->grad[idx] += v;
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw Error(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

}  // namespace

NoGradGuard::NoGradGuard() { ++no_grad_depth; }
NoGradGuard::~NoGradGuard() { --no_grad_depth; }
bool grad_recording() { return no_grad_depth == 0; }

// ---- Tensor basics ----------------------------------------------------

TensorPtr Tensor::scalar(double v, bool requires_grad) {
  auto t = std::make_shared<Tensor>();
  t->shape = {1};
  t->value = {v};
  t->requires_grad = requires_grad;
  return t;
}

TensorPtr Tensor::vec(std::vector<double> v, bool requires_grad) {
  auto t = std::make_shared<Tensor>();
  t->shape = {v.size()};
  t->value = std::move(v);
  t->requires_grad = requires_grad;
  return t;
}

TensorPtr Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> v,
                         bool requires_grad) {
  if (v.size() != rows * cols) {
    throw Error("Tensor::matrix: " + std::to_string(v.size()) + " values for shape {" +
                std::to_string(rows) + "," + std::to_string(cols) + "}");
  }
  auto t = std::make_shared<Tensor>();
  t->shape = {rows, cols};
  t->value = std::move(v);
  t->requires_grad = requires_grad;
  return t;
}

TensorPtr Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->value.assign(shape_numel(t->shape), 0.0);
  t->requires_grad = requires_grad;
  return t;
}

std::size_t Tensor::rows() const { return shape.size() == 2 ? shape[0] : 1; }
std::size_t Tensor::cols() const { return shape.size() == 2 ? shape[1] : shape[0]; }

void Tensor::ensure_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
}

void Tensor::zero_grad() {
  std::fill(grad.begin(), grad.end(), 0.0);
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << "}";
  return os.str();
}

// ---- backward ---------------------------------------------------------

void backward(const TensorPtr& loss) {
  if (!loss->is_scalar()) {
    throw Error("backward: loss must be scalar, got shape " + loss->shape_str());
  }
  if (!loss->requires_grad) return;

  // iterative postorder over the DAG
  std::vector<Tensor*> order;
  std::unordered_set<const Tensor*> seen;
  std::vector<std::pair<Tensor*, std::size_t>> stack;
  stack.emplace_back(loss.get(), 0);
  seen.insert(loss.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Tensor* p = node->parents[next].get();
      ++next;
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // interior grads are scratch per pass; leaf (parameter) grads accumulate
  for (Tensor* t : order) {
    if (!t->parents.empty()) {
      t->ensure_grad();
      t->zero_grad();
    }
  }
  loss->ensure_grad();
  loss->grad[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Tensor* t = *it;
    if (t->backprop) t->backprop(*t);
  }
}

// ---- elementwise ------------------------------------------------------

TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
  if (a->shape != b->shape) shape_error("add", *a, *b);
  auto out = make_node(a->shape, {a, b});
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = a->value[i] + b->value[i];
  if (out->requires_grad) {
    Tensor* pa = a.get();
    Tensor* pb = b.get();
    out->backprop = [pa, pb](const Tensor& o) {
      if (pa->requires_grad)
        for (std::size_t i = 0; i < o.size(); ++i) accumulate(pa, i, o.grad[i]);
      if (pb->requires_grad)
        for (std::size_t i = 0; i < o.size(); ++i) accumulate(pb, i, o.grad[i]);
    };
  }
  return out;
}

TensorPtr sub(const TensorPtr& a, const TensorPtr& b) {
  if (a->shape != b->shape) shape_error("sub", *a, *b);
  auto out = make_node(a->shape, {a, b});
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = a->value[i] - b->value[i];
  if (out->requires_grad) {
    Tensor* pa = a.get();
    Tensor* pb = b.get();
    out->backprop = [pa, pb](const Tensor& o) {
      if (pa->requires_grad)
        for (std::size_t i = 0; i < o.size(); ++i) accumulate(pa, i, o.grad[i]);
      if (pb->requires_grad)
        for (std::size_t i = 0; i < o.size(); ++i) accumulate(pb, i, -o.grad[i]);
    };
  }
  return out;
}

TensorPtr mul(const TensorPtr& a, const TensorPtr& b) {
  if (a->shape != b->shape) shape_error("mul", *a, *b);
  auto out = make_node(a->shape, {a, b});
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = a->value[i] * b->value[i];
  if (out->requires_grad) {
    Tensor* pa = a.get();
    Tensor* pb = b.get();
    out->backprop = [pa, pb](const Tensor& o) {
      if (pa->requires_grad)
        for (std::size_t i = 0; i < o.size(); ++i) accumulate(pa, i, o.grad[i] * pb->value[i]);
      if (pb->requires_grad)
        for (std::size_t i = 0; i < o.size(); ++i) accumulate(pb, i, o.grad[i] * pa->value[i]);
    };
  }
  return out;
}

TensorPtr scale(const TensorPtr& a, double c) {
  auto out = make_node(a->shape, {a});
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = c * a->value[i];
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, c](const Tensor& o) {
      for (std::size_t i = 0; i < o.size(); ++i) accumulate(pa, i, c * o.grad[i]);
    };
  }
  return out;
}

TensorPtr one_minus(const TensorPtr& a) {
  auto out = make_node(a->shape, {a});
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = 1.0 - a->value[i];
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa](const Tensor& o) {
      for (std::size_t i = 0; i < o.size(); ++i) accumulate(pa, i, -o.grad[i]);
    };
  }
  return out;
}

// ---- matmul / transpose ----------------------------------------------

TensorPtr matmul(const TensorPtr& a, const TensorPtr& b) {
  if (b->rank() != 2) shape_error("matmul", *a, *b);
  const std::size_t m = a->rank() == 2 ? a->shape[0] : 1;
  const std::size_t k = a->rank() == 2 ? a->shape[1] : a->shape[0];
  if (k != b->shape[0]) shape_error("matmul", *a, *b);
  const std::size_t n = b->shape[1];

  std::vector<std::size_t> out_shape =
      a->rank() == 2 ? std::vector<std::size_t>{m, n} : std::vector<std::size_t>{n};
  auto out = make_node(out_shape, {a, b});

  const double* av = a->value.data();
  const double* bv = b->value.data();
  double* ov = out->value.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = ov + i * n;
    const double* arow = av + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = arow[kk];
      if (aik == 0.0) continue;
      const double* brow = bv + kk * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }

  if (out->requires_grad) {
    Tensor* pa = a.get();
    Tensor* pb = b.get();
    out->backprop = [pa, pb, m, k, n](const Tensor& o) {
      const double* g = o.grad.data();
      if (pa->requires_grad) {
        pa->ensure_grad();
        // dA = G * B^T
        for (std::size_t i = 0; i < m; ++i) {
          const double* grow = g + i * n;
          double* garow = pa->grad.data() + i * k;
          for (std::size_t kk = 0; kk < k; ++kk) {
            const double* brow = pb->value.data() + kk * n;
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += grow[j] * brow[j];
            garow[kk] += s;
          }
        }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        // dB = A^T * G
        for (std::size_t kk = 0; kk < k; ++kk) {
          double* gbrow = pb->grad.data() + kk * n;
          for (std::size_t i = 0; i < m; ++i) {
            const double aik = pa->value[i * k + kk];
            if (aik == 0.0) continue;
            const double* grow = g + i * n;
            for (std::size_t j = 0; j < n; ++j) gbrow[j] += aik * grow[j];
          }
        }
      }
    };
  }
  return out;
}

TensorPtr matvec(const TensorPtr& a, const TensorPtr& v) {
  if (a->rank() != 2 || v->rank() != 1 || a->shape[1] != v->size())
    shape_error("matvec", *a, *v);
  const std::size_t m = a->shape[0], n = a->shape[1];
  auto out = make_node({m}, {a, v});
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    const double* arow = a->value.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) s += arow[j] * v->value[j];
    out->value[i] = s;
  }
  if (out->requires_grad) {
    Tensor* pa = a.get();
    Tensor* pv = v.get();
    out->backprop = [pa, pv, m, n](const Tensor& o) {
      if (pa->requires_grad) {
        pa->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          const double g = o.grad[i];
          if (g == 0.0) continue;
          double* garow = pa->grad.data() + i * n;
          for (std::size_t j = 0; j < n; ++j) garow[j] += g * pv->value[j];
        }
      }
      if (pv->requires_grad) {
        pv->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          const double g = o.grad[i];
          if (g == 0.0) continue;
          const double* arow = pa->value.data() + i * n;
          for (std::size_t j = 0; j < n; ++j) pv->grad[j] += g * arow[j];
        }
      }
    };
  }
  return out;
}

TensorPtr transpose(const TensorPtr& a) {
  if (a->rank() != 2) throw Error("transpose: need rank-2, got " + a->shape_str());
  const std::size_t m = a->shape[0], n = a->shape[1];
  auto out = make_node({n, m}, {a});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out->value[j * m + i] = a->value[i * n + j];
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, m, n](const Tensor& o) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) pa->grad[i * n + j] += o.grad[j * m + i];
    };
  }
  return out;
}

TensorPtr linear(const TensorPtr& x, const TensorPtr& w, const TensorPtr& bias) {
  auto y = matmul(x, w);
  if (!bias) return y;
  if (y->rank() == 1) {
    if (bias->shape != y->shape) shape_error("linear bias", *y, *bias);
    return add(y, bias);
  }
  return add_row_broadcast(y, bias);
}

// ---- nonlinearities ----------------------------------------------------

TensorPtr sigmoid(const TensorPtr& a) {
  auto out = make_node(a->shape, {a});
  for (std::size_t i = 0; i < out->size(); ++i) {
    const double x = a->value[i];
    out->value[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa](const Tensor& o) {
      for (std::size_t i = 0; i < o.size(); ++i) {
        const double s = o.value[i];
        accumulate(pa, i, o.grad[i] * s * (1.0 - s));
      }
    };
  }
  return out;
}

TensorPtr tanh_op(const TensorPtr& a) {
  auto out = make_node(a->shape, {a});
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = std::tanh(a->value[i]);
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa](const Tensor& o) {
      for (std::size_t i = 0; i < o.size(); ++i) {
        const double t = o.value[i];
        accumulate(pa, i, o.grad[i] * (1.0 - t * t));
      }
    };
  }
  return out;
}

TensorPtr log_clamped(const TensorPtr& a, double floor) {
  auto out = make_node(a->shape, {a});
  for (std::size_t i = 0; i < out->size(); ++i)
    out->value[i] = std::log(std::max(a->value[i], floor));
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, floor](const Tensor& o) {
      for (std::size_t i = 0; i < o.size(); ++i) {
        if (pa->value[i] > floor) accumulate(pa, i, o.grad[i] / pa->value[i]);
      }
    };
  }
  return out;
}

// ---- softmax ------------------------------------------------------------

namespace {

void softmax_span(const double* in, double* out, std::size_t n, std::size_t stride) {
  double mx = in[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, in[i * stride]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(in[i * stride] - mx);
    out[i * stride] = e;
    sum += e;
  }
  for (std::size_t i = 0; i < n; ++i) out[i * stride] /= sum;
}

void softmax_span_backward(const double* out, const double* g, double* acc, std::size_t n,
                           std::size_t stride) {
  double dotv = 0.0;
  for (std::size_t i = 0; i < n; ++i) dotv += g[i * stride] * out[i * stride];
  for (std::size_t i = 0; i < n; ++i)
    acc[i * stride] += out[i * stride] * (g[i * stride] - dotv);
}

void check_finite(const Tensor& a, const char* op) {
  for (double v : a.value) {
    if (std::isnan(v)) throw Error(std::string(op) + ": NaN input");
  }
}

}  // namespace

TensorPtr softmax_rows(const TensorPtr& a) {
  check_finite(*a, "softmax_rows");
  auto out = make_node(a->shape, {a});
  const std::size_t m = a->rows(), n = a->cols();
  for (std::size_t i = 0; i < m; ++i)
    softmax_span(a->value.data() + i * n, out->value.data() + i * n, n, 1);
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, m, n](const Tensor& o) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        softmax_span_backward(o.value.data() + i * n, o.grad.data() + i * n,
                              pa->grad.data() + i * n, n, 1);
    };
  }
  return out;
}

TensorPtr softmax_cols(const TensorPtr& a) {
  check_finite(*a, "softmax_cols");
  if (a->rank() != 2) throw Error("softmax_cols: need rank-2, got " + a->shape_str());
  auto out = make_node(a->shape, {a});
  const std::size_t m = a->shape[0], n = a->shape[1];
  for (std::size_t j = 0; j < n; ++j)
    softmax_span(a->value.data() + j, out->value.data() + j, m, n);
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, m, n](const Tensor& o) {
      pa->ensure_grad();
      for (std::size_t j = 0; j < n; ++j)
        softmax_span_backward(o.value.data() + j, o.grad.data() + j, pa->grad.data() + j, m, n);
    };
  }
  return out;
}

// ---- shape plumbing ------------------------------------------------------

TensorPtr concat_rows(const TensorPtr& a, const TensorPtr& b) {
  if (a->rank() != 2 || b->rank() != 2 || a->shape[1] != b->shape[1])
    shape_error("concat_rows", *a, *b);
  const std::size_t m = a->shape[0], p = b->shape[0], n = a->shape[1];
  auto out = make_node({m + p, n}, {a, b});
  std::copy(a->value.begin(), a->value.end(), out->value.begin());
  std::copy(b->value.begin(), b->value.end(), out->value.begin() + m * n);
  if (out->requires_grad) {
    Tensor* pa = a.get();
    Tensor* pb = b.get();
    out->backprop = [pa, pb, m, n](const Tensor& o) {
      if (pa->requires_grad) {
        pa->ensure_grad();
        for (std::size_t i = 0; i < pa->size(); ++i) pa->grad[i] += o.grad[i];
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < pb->size(); ++i) pb->grad[i] += o.grad[m * n + i];
      }
    };
  }
  return out;
}

TensorPtr concat_cols(const TensorPtr& a, const TensorPtr& b) {
  if (a->rank() != 2 || b->rank() != 2 || a->shape[0] != b->shape[0])
    shape_error("concat_cols", *a, *b);
  const std::size_t m = a->shape[0], n = a->shape[1], p = b->shape[1];
  auto out = make_node({m, n + p}, {a, b});
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(a->value.begin() + i * n, a->value.begin() + (i + 1) * n,
              out->value.begin() + i * (n + p));
    std::copy(b->value.begin() + i * p, b->value.begin() + (i + 1) * p,
              out->value.begin() + i * (n + p) + n);
  }
  if (out->requires_grad) {
    Tensor* pa = a.get();
    Tensor* pb = b.get();
    out->backprop = [pa, pb, m, n, p](const Tensor& o) {
      for (std::size_t i = 0; i < m; ++i) {
        if (pa->requires_grad) {
          pa->ensure_grad();
          for (std::size_t j = 0; j < n; ++j) pa->grad[i * n + j] += o.grad[i * (n + p) + j];
        }
        if (pb->requires_grad) {
          pb->ensure_grad();
          for (std::size_t j = 0; j < p; ++j) pb->grad[i * p + j] += o.grad[i * (n + p) + n + j];
        }
      }
    };
  }
  return out;
}

TensorPtr concat_vec(const TensorPtr& a, const TensorPtr& b) {
  if (a->rank() != 1 || b->rank() != 1) shape_error("concat_vec", *a, *b);
  const std::size_t n = a->size(), p = b->size();
  auto out = make_node({n + p}, {a, b});
  std::copy(a->value.begin(), a->value.end(), out->value.begin());
  std::copy(b->value.begin(), b->value.end(), out->value.begin() + n);
  if (out->requires_grad) {
    Tensor* pa = a.get();
    Tensor* pb = b.get();
    out->backprop = [pa, pb, n, p](const Tensor& o) {
      if (pa->requires_grad)
        for (std::size_t i = 0; i < n; ++i) accumulate(pa, i, o.grad[i]);
      if (pb->requires_grad)
        for (std::size_t i = 0; i < p; ++i) accumulate(pb, i, o.grad[n + i]);
    };
  }
  return out;
}

TensorPtr concat_many(const std::vector<TensorPtr>& parts) {
  if (parts.empty()) throw Error("concat_many: no parts");
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p->rank() != 1) throw Error("concat_many: need rank-1 parts, got " + p->shape_str());
    total += p->size();
  }
  auto out = make_node({total}, parts);
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::copy(p->value.begin(), p->value.end(), out->value.begin() + off);
    off += p->size();
  }
  if (out->requires_grad) {
    std::vector<Tensor*> ps;
    std::vector<std::size_t> offs;
    std::size_t o = 0;
    for (const auto& p : parts) {
      ps.push_back(p.get());
      offs.push_back(o);
      o += p->size();
    }
    out->backprop = [ps, offs](const Tensor& out_t) {
      for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps[i]->requires_grad) continue;
        for (std::size_t j = 0; j < ps[i]->size(); ++j)
          accumulate(ps[i], j, out_t.grad[offs[i] + j]);
      }
    };
  }
  return out;
}

TensorPtr slice_vec(const TensorPtr& a, std::size_t lo, std::size_t hi) {
  if (a->rank() != 1 || lo >= hi || hi > a->size())
    throw Error("slice_vec: invalid range [" + std::to_string(lo) + "," + std::to_string(hi) +
                ") for " + a->shape_str());
  auto out = make_node({hi - lo}, {a});
  std::copy(a->value.begin() + lo, a->value.begin() + hi, out->value.begin());
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, lo](const Tensor& o) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < o.size(); ++i) pa->grad[lo + i] += o.grad[i];
    };
  }
  return out;
}

TensorPtr stack_rows(const std::vector<TensorPtr>& rows) {
  if (rows.empty()) throw Error("stack_rows: no rows");
  const std::size_t n = rows[0]->size();
  for (const auto& r : rows) {
    if (r->rank() != 1 || r->size() != n) shape_error("stack_rows", *rows[0], *r);
  }
  auto out = make_node({rows.size(), n}, rows);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i]->value.begin(), rows[i]->value.end(), out->value.begin() + i * n);
  if (out->requires_grad) {
    std::vector<Tensor*> ps;
    ps.reserve(rows.size());
    for (const auto& r : rows) ps.push_back(r.get());
    out->backprop = [ps, n](const Tensor& o) {
      for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps[i]->requires_grad) continue;
        for (std::size_t j = 0; j < n; ++j) accumulate(ps[i], j, o.grad[i * n + j]);
      }
    };
  }
  return out;
}

TensorPtr row(const TensorPtr& a, std::size_t i) {
  if (a->rank() != 2 || i >= a->shape[0])
    throw Error("row: index " + std::to_string(i) + " out of range for " + a->shape_str());
  const std::size_t n = a->shape[1];
  auto out = make_node({n}, {a});
  std::copy(a->value.begin() + i * n, a->value.begin() + (i + 1) * n, out->value.begin());
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, i, n](const Tensor& o) {
      pa->ensure_grad();
      for (std::size_t j = 0; j < n; ++j) pa->grad[i * n + j] += o.grad[j];
    };
  }
  return out;
}

// ---- reductions -----------------------------------------------------------

TensorPtr sum_rows(const TensorPtr& a) {
  if (a->rank() != 2) throw Error("sum_rows: need rank-2, got " + a->shape_str());
  const std::size_t m = a->shape[0], n = a->shape[1];
  auto out = make_node({n}, {a});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out->value[j] += a->value[i * n + j];
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, m, n](const Tensor& o) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) pa->grad[i * n + j] += o.grad[j];
    };
  }
  return out;
}

TensorPtr mean_rows(const TensorPtr& a) { return scale(sum_rows(a), 1.0 / double(a->rows())); }

TensorPtr sum_all(const TensorPtr& a) {
  auto out = make_node({1}, {a});
  double s = 0.0;
  for (double v : a->value) s += v;
  out->value[0] = s;
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa](const Tensor& o) {
      for (std::size_t i = 0; i < pa->size(); ++i) accumulate(pa, i, o.grad[0]);
    };
  }
  return out;
}

TensorPtr dot(const TensorPtr& a, const TensorPtr& b) {
  if (a->rank() != 1 || a->shape != b->shape) shape_error("dot", *a, *b);
  auto out = make_node({1}, {a, b});
  double s = 0.0;
  for (std::size_t i = 0; i < a->size(); ++i) s += a->value[i] * b->value[i];
  out->value[0] = s;
  if (out->requires_grad) {
    Tensor* pa = a.get();
    Tensor* pb = b.get();
    out->backprop = [pa, pb](const Tensor& o) {
      const double g = o.grad[0];
      if (pa->requires_grad)
        for (std::size_t i = 0; i < pa->size(); ++i) accumulate(pa, i, g * pb->value[i]);
      if (pb->requires_grad)
        for (std::size_t i = 0; i < pb->size(); ++i) accumulate(pb, i, g * pa->value[i]);
    };
  }
  return out;
}

TensorPtr pick(const TensorPtr& a, std::size_t i) {
  if (a->rank() != 1 || i >= a->size())
    throw Error("pick: index " + std::to_string(i) + " out of range for " + a->shape_str());
  auto out = make_node({1}, {a});
  out->value[0] = a->value[i];
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, i](const Tensor& o) { accumulate(pa, i, o.grad[0]); };
  }
  return out;
}

TensorPtr cumsum(const TensorPtr& a) {
  if (a->rank() != 1) throw Error("cumsum: need rank-1, got " + a->shape_str());
  const std::size_t n = a->size();
  auto out = make_node({n}, {a});
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += a->value[i];
    out->value[i] = s;
  }
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, n](const Tensor& o) {
      pa->ensure_grad();
      double s = 0.0;
      for (std::size_t i = n; i-- > 0;) {
        s += o.grad[i];
        pa->grad[i] += s;
      }
    };
  }
  return out;
}

TensorPtr rcumsum(const TensorPtr& a) {
  if (a->rank() != 1) throw Error("rcumsum: need rank-1, got " + a->shape_str());
  const std::size_t n = a->size();
  auto out = make_node({n}, {a});
  double s = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    s += a->value[i];
    out->value[i] = s;
  }
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, n](const Tensor& o) {
      pa->ensure_grad();
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s += o.grad[i];
        pa->grad[i] += s;
      }
    };
  }
  return out;
}

// ---- broadcasts ------------------------------------------------------------

TensorPtr scale_rows(const TensorPtr& m, const TensorPtr& s) {
  if (m->rank() != 2 || s->rank() != 1 || s->size() != m->shape[0])
    shape_error("scale_rows", *m, *s);
  const std::size_t r = m->shape[0], c = m->shape[1];
  auto out = make_node({r, c}, {m, s});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out->value[i * c + j] = m->value[i * c + j] * s->value[i];
  if (out->requires_grad) {
    Tensor* pm = m.get();
    Tensor* ps = s.get();
    out->backprop = [pm, ps, r, c](const Tensor& o) {
      for (std::size_t i = 0; i < r; ++i) {
        if (pm->requires_grad) {
          pm->ensure_grad();
          for (std::size_t j = 0; j < c; ++j)
            pm->grad[i * c + j] += o.grad[i * c + j] * ps->value[i];
        }
        if (ps->requires_grad) {
          double acc = 0.0;
          for (std::size_t j = 0; j < c; ++j) acc += o.grad[i * c + j] * pm->value[i * c + j];
          accumulate(ps, i, acc);
        }
      }
    };
  }
  return out;
}

TensorPtr add_col_broadcast(const TensorPtr& m, const TensorPtr& s) {
  if (m->rank() != 2 || s->rank() != 1 || s->size() != m->shape[0])
    shape_error("add_col_broadcast", *m, *s);
  const std::size_t r = m->shape[0], c = m->shape[1];
  auto out = make_node({r, c}, {m, s});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out->value[i * c + j] = m->value[i * c + j] + s->value[i];
  if (out->requires_grad) {
    Tensor* pm = m.get();
    Tensor* ps = s.get();
    out->backprop = [pm, ps, r, c](const Tensor& o) {
      for (std::size_t i = 0; i < r; ++i) {
        if (pm->requires_grad) {
          pm->ensure_grad();
          for (std::size_t j = 0; j < c; ++j) pm->grad[i * c + j] += o.grad[i * c + j];
        }
        if (ps->requires_grad) {
          double acc = 0.0;
          for (std::size_t j = 0; j < c; ++j) acc += o.grad[i * c + j];
          accumulate(ps, i, acc);
        }
      }
    };
  }
  return out;
}

TensorPtr add_row_broadcast(const TensorPtr& m, const TensorPtr& v) {
  if (m->rank() != 2 || v->rank() != 1 || v->size() != m->shape[1])
    shape_error("add_row_broadcast", *m, *v);
  const std::size_t r = m->shape[0], c = m->shape[1];
  auto out = make_node({r, c}, {m, v});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out->value[i * c + j] = m->value[i * c + j] + v->value[j];
  if (out->requires_grad) {
    Tensor* pm = m.get();
    Tensor* pv = v.get();
    out->backprop = [pm, pv, r, c](const Tensor& o) {
      if (pm->requires_grad) {
        pm->ensure_grad();
        for (std::size_t i = 0; i < o.size(); ++i) pm->grad[i] += o.grad[i];
      }
      if (pv->requires_grad) {
        pv->ensure_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) pv->grad[j] += o.grad[i * c + j];
      }
    };
  }
  return out;
}

// ---- pooling / embedding -----------------------------------------------------

TensorPtr max_pool_window(const TensorPtr& a, std::size_t lo, std::size_t hi) {
  if (a->rank() != 2) throw Error("max_pool_window: need rank-2, got " + a->shape_str());
  if (lo >= hi || hi > a->shape[0]) {
    throw Error("max_pool_window: invalid window [" + std::to_string(lo) + "," +
                std::to_string(hi) + ") for " + a->shape_str());
  }
  const std::size_t c = a->shape[1];
  auto out = make_node({c}, {a});
  std::vector<std::size_t> arg(c, lo);
  for (std::size_t j = 0; j < c; ++j) {
    double best = a->value[lo * c + j];
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double v = a->value[i * c + j];
      if (v > best) {
        best = v;
        arg[j] = i;
      }
    }
    out->value[j] = best;
  }
  if (out->requires_grad) {
    Tensor* pa = a.get();
    out->backprop = [pa, arg, c](const Tensor& o) {
      pa->ensure_grad();
      for (std::size_t j = 0; j < c; ++j) pa->grad[arg[j] * c + j] += o.grad[j];
    };
  }
  return out;
}

TensorPtr embed_rows(const TensorPtr& table, const std::vector<int>& ids) {
  if (table->rank() != 2) throw Error("embed_rows: table must be rank-2");
  const std::size_t v = table->shape[0], e = table->shape[1];
  if (ids.empty()) throw Error("embed_rows: empty id list");
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= v)
      throw Error("embed_rows: id " + std::to_string(id) + " out of range for " +
                  table->shape_str());
  }
  auto out = make_node({ids.size(), e}, {table});
  for (std::size_t i = 0; i < ids.size(); ++i)
    std::copy(table->value.begin() + ids[i] * e, table->value.begin() + (ids[i] + 1) * e,
              out->value.begin() + i * e);
  if (out->requires_grad) {
    Tensor* pt = table.get();
    out->backprop = [pt, ids, e](const Tensor& o) {
      pt->ensure_grad();
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = 0; j < e; ++j) pt->grad[ids[i] * e + j] += o.grad[i * e + j];
    };
  }
  return out;
}

}  // namespace murke
