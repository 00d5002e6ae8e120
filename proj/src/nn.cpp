#include "murke/nn.hpp"

#include <algorithm>
#include <cmath>

namespace murke {

TensorPtr init_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> v(fan_in * fan_out);
  for (auto& x : v) x = rng.uniform(-bound, bound);
  return Tensor::matrix(fan_in, fan_out, std::move(v), true);
}

TensorPtr init_vector(std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> v(fan_in);
  for (auto& x : v) x = rng.uniform(-bound, bound);
  return Tensor::vec(std::move(v), true);
}

TensorPtr zero_vector(std::size_t n) {
  return Tensor::vec(std::vector<double>(n, 0.0), true);
}

TensorPtr init_embedding(std::size_t vocab, std::size_t dim, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<double> v(vocab * dim);
  for (auto& x : v) x = rng.uniform(-bound, bound);
  return Tensor::matrix(vocab, dim, std::move(v), true);
}

GruParams GruParams::init(std::size_t in_dim, std::size_t hidden_dim, Rng& rng) {
  GruParams p;
  p.wz_x = init_weight(in_dim, hidden_dim, rng);
  p.wz_h = init_weight(hidden_dim, hidden_dim, rng);
  p.bz = zero_vector(hidden_dim);
  p.wr_x = init_weight(in_dim, hidden_dim, rng);
  p.wr_h = init_weight(hidden_dim, hidden_dim, rng);
  p.br = zero_vector(hidden_dim);
  p.wh_x = init_weight(in_dim, hidden_dim, rng);
  p.wh_h = init_weight(hidden_dim, hidden_dim, rng);
  p.bh = zero_vector(hidden_dim);
  return p;
}

void GruParams::collect(const std::string& prefix, std::vector<NamedParam>& out) const {
  out.push_back({prefix + ".wz_x", wz_x});
  out.push_back({prefix + ".wz_h", wz_h});
  out.push_back({prefix + ".bz", bz});
  out.push_back({prefix + ".wr_x", wr_x});
  out.push_back({prefix + ".wr_h", wr_h});
  out.push_back({prefix + ".br", br});
  out.push_back({prefix + ".wh_x", wh_x});
  out.push_back({prefix + ".wh_h", wh_h});
  out.push_back({prefix + ".bh", bh});
}

BiGruParams BiGruParams::init(std::size_t in_dim, std::size_t hidden_dim, Rng& rng) {
  BiGruParams p;
  p.fwd = GruParams::init(in_dim, hidden_dim, rng);
  p.bwd = GruParams::init(in_dim, hidden_dim, rng);
  return p;
}

void BiGruParams::collect(const std::string& prefix, std::vector<NamedParam>& out) const {
  fwd.collect(prefix + ".fwd", out);
  bwd.collect(prefix + ".bwd", out);
}

TensorPtr gru_cell(const TensorPtr& x, const TensorPtr& h_prev, const GruParams& p) {
  auto z = sigmoid(add(add(matmul(x, p.wz_x), matmul(h_prev, p.wz_h)), p.bz));
  auto r = sigmoid(add(add(matmul(x, p.wr_x), matmul(h_prev, p.wr_h)), p.br));
  auto hcand = tanh_op(add(add(matmul(x, p.wh_x), matmul(mul(r, h_prev), p.wh_h)), p.bh));
  return add(mul(one_minus(z), h_prev), mul(z, hcand));
}

std::vector<TensorPtr> gru_run(const TensorPtr& seq, const GruParams& p, const TensorPtr& h0,
                               bool reverse) {
  if (seq->rank() != 2 || seq->shape[0] == 0)
    throw Error("gru_run: need a non-empty {L,e} sequence, got " + seq->shape_str());
  const std::size_t len = seq->shape[0];
  TensorPtr h = h0 ? h0 : Tensor::zeros({p.hidden_dim()});
  std::vector<TensorPtr> states(len);
  for (std::size_t step = 0; step < len; ++step) {
    const std::size_t t = reverse ? len - 1 - step : step;
    h = gru_cell(row(seq, t), h, p);
    states[t] = h;
  }
  return states;
}

TensorPtr bigru(const TensorPtr& seq, const GruParams& fwd, const GruParams& bwd,
                const TensorPtr& h0_fwd, const TensorPtr& h0_bwd) {
  if (seq->rank() != 2 || seq->shape[0] == 0)
    throw Error("bigru: need a non-empty {L,e} sequence, got " + seq->shape_str());
  auto fs = gru_run(seq, fwd, h0_fwd, false);
  auto bs = gru_run(seq, bwd, h0_bwd, true);
  std::vector<TensorPtr> rows;
  rows.reserve(fs.size());
  for (std::size_t t = 0; t < fs.size(); ++t) rows.push_back(concat_vec(fs[t], bs[t]));
  return stack_rows(rows);
}

TensorPtr bigru(const TensorPtr& seq, const BiGruParams& p, const TensorPtr& h0_fwd,
                const TensorPtr& h0_bwd) {
  return bigru(seq, p.fwd, p.bwd, h0_fwd, h0_bwd);
}

// ---- SGD --------------------------------------------------------------------

void sgd_step(const std::vector<TensorPtr>& params, const SgdSchedule& sched) {
  if (!(sched.lr > 0.0)) throw Error("sgd_step: lr must be positive");
  const double lr_t = sched.current_lr();
  for (const auto& p : params) {
    if (p->grad.empty()) continue;
    if (p->grad.size() != p->value.size())
      throw Error("sgd_step: grad shape mismatch for " + p->shape_str());
    for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= lr_t * p->grad[i];
  }
}

void sgd_step(const std::vector<NamedParam>& params, const SgdSchedule& sched) {
  std::vector<TensorPtr> ts = tensors_of(params);
  sgd_step(ts, sched);
}

void zero_grads(const std::vector<TensorPtr>& params) {
  for (const auto& p : params) p->zero_grad();
}

void zero_grads(const std::vector<NamedParam>& params) {
  for (const auto& p : params) p.tensor->zero_grad();
}

std::vector<TensorPtr> tensors_of(const std::vector<NamedParam>& params) {
  std::vector<TensorPtr> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.tensor);
  return out;
}

// ---- gradient checking ---------------------------------------------------------

std::vector<std::vector<double>> numeric_gradients(const std::function<TensorPtr()>& f,
                                                   const std::vector<TensorPtr>& params,
                                                   double eps) {
  std::vector<std::vector<double>> grads(params.size());
  NoGradGuard ng;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = *params[pi];
    grads[pi].resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double orig = p.value[i];
      p.value[i] = orig + eps;
      const double fp = f()->value[0];
      p.value[i] = orig - eps;
      const double fm = f()->value[0];
      p.value[i] = orig;
      grads[pi][i] = (fp - fm) / (2.0 * eps);
    }
  }
  return grads;
}

std::vector<std::vector<double>> analytic_gradients(const std::function<TensorPtr()>& f,
                                                    const std::vector<TensorPtr>& params) {
  std::vector<std::vector<double>> before(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i]->ensure_grad();
    before[i] = params[i]->grad;
  }
  auto loss = f();
  backward(loss);
  std::vector<std::vector<double>> grads(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    grads[i].resize(params[i]->size());
    for (std::size_t j = 0; j < grads[i].size(); ++j)
      grads[i][j] = params[i]->grad[j] - before[i][j];
    params[i]->grad = before[i];  // leave caller state untouched
  }
  return grads;
}

double max_rel_error(const std::vector<std::vector<double>>& analytic,
                     const std::vector<std::vector<double>>& numeric) {
  double worst = 0.0;
  for (std::size_t pi = 0; pi < analytic.size(); ++pi) {
    for (std::size_t i = 0; i < analytic[pi].size(); ++i) {
      const double a = analytic[pi][i];
      const double n = numeric[pi][i];
      const double denom = std::max({std::abs(a), std::abs(n), 1e-4});
      worst = std::max(worst, std::abs(a - n) / denom);
    }
  }
  return worst;
}

double grad_check(const std::function<TensorPtr()>& f, const std::vector<TensorPtr>& params,
                  double eps) {
  auto analytic = analytic_gradients(f, params);
  auto numeric = numeric_gradients(f, params, eps);
  return max_rel_error(analytic, numeric);
}

}  // namespace murke
