#pragma once

#include <functional>
#include <string>
#include <vector>

#include "murke/tensor.hpp"

namespace murke {

/// Named parameter handle; checkpoints and optimizers work off flat lists
/// of these.
struct NamedParam {
  std::string name;
  TensorPtr tensor;
};

/// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) initialization for a weight
/// matrix; biases start at zero.
TensorPtr init_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng);
TensorPtr init_vector(std::size_t fan_in, Rng& rng);  // {fan_in}, same rule
TensorPtr zero_vector(std::size_t n);
/// Embedding table {vocab, dim}; the fan-in is the embedding dimension.
TensorPtr init_embedding(std::size_t vocab, std::size_t dim, Rng& rng);

/// One GRU direction, input dim -> hidden dim.
/// Convention: z = sig(x Wzx + h Wzh + bz), r = sig(x Wrx + h Wrh + br),
/// hcand = tanh(x Whx + (r*h) Whh + bh), h' = (1-z)*h + z*hcand.
struct GruParams {
  TensorPtr wz_x, wz_h, bz;
  TensorPtr wr_x, wr_h, br;
  TensorPtr wh_x, wh_h, bh;

  static GruParams init(std::size_t in_dim, std::size_t hidden_dim, Rng& rng);
  std::size_t in_dim() const { return wz_x->shape[0]; }
  std::size_t hidden_dim() const { return wz_x->shape[1]; }
  void collect(const std::string& prefix, std::vector<NamedParam>& out) const;
};

struct BiGruParams {
  GruParams fwd, bwd;
  static BiGruParams init(std::size_t in_dim, std::size_t hidden_dim, Rng& rng);
  std::size_t hidden_dim() const { return fwd.hidden_dim(); }
  void collect(const std::string& prefix, std::vector<NamedParam>& out) const;
};

/// Single GRU step. x: {in}, h_prev: {d} -> {d}.
TensorPtr gru_cell(const TensorPtr& x, const TensorPtr& h_prev, const GruParams& p);

/// Runs one direction over the rows of seq {L,in}; returns L states {d}.
/// h0 defaults to zeros; reverse=true scans from the last row.
std::vector<TensorPtr> gru_run(const TensorPtr& seq, const GruParams& p,
                               const TensorPtr& h0 = nullptr, bool reverse = false);

/// Bidirectional encoding: row t is [fwd state at t ; bwd state at t], {L,2d}.
/// L = 0 is an error.
TensorPtr bigru(const TensorPtr& seq, const GruParams& fwd, const GruParams& bwd,
                const TensorPtr& h0_fwd = nullptr, const TensorPtr& h0_bwd = nullptr);
TensorPtr bigru(const TensorPtr& seq, const BiGruParams& p, const TensorPtr& h0_fwd = nullptr,
                const TensorPtr& h0_bwd = nullptr);

// ---- SGD ------------------------------------------------------------------

/// lr_t = lr / (1 + decay * epoch); epoch advanced by the training loop.
struct SgdSchedule {
  double lr = 0.015;
  double decay = 0.05;
  int epoch = 0;
  double current_lr() const { return lr / (1.0 + decay * epoch); }
};

/// theta <- theta - lr_t * grad for every parameter carrying a gradient.
void sgd_step(const std::vector<TensorPtr>& params, const SgdSchedule& sched);
void sgd_step(const std::vector<NamedParam>& params, const SgdSchedule& sched);
void zero_grads(const std::vector<TensorPtr>& params);
void zero_grads(const std::vector<NamedParam>& params);
std::vector<TensorPtr> tensors_of(const std::vector<NamedParam>& params);

// ---- gradient checking -------------------------------------------------------

/// Central-difference gradients of f at the current parameter values,
/// one flat vector per parameter. f must be deterministic.
std::vector<std::vector<double>> numeric_gradients(const std::function<TensorPtr()>& f,
                                                   const std::vector<TensorPtr>& params,
                                                   double eps = 1e-5);

/// Max relative error between two gradient sets,
/// |a-n| / max(|a|, |n|, 1e-4) over all coordinates.
double max_rel_error(const std::vector<std::vector<double>>& analytic,
                     const std::vector<std::vector<double>>& numeric);

/// Runs f, backpropagates, and compares analytic grads against central
/// differences. Returns the max relative error.
double grad_check(const std::function<TensorPtr()>& f, const std::vector<TensorPtr>& params,
                  double eps = 1e-5);

/// Analytic gradients from one fresh forward/backward pass of f.
std::vector<std::vector<double>> analytic_gradients(const std::function<TensorPtr()>& f,
                                                    const std::vector<TensorPtr>& params);

}  // namespace murke
