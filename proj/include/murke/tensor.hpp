#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "murke/common.hpp"

namespace murke {

class Tensor;
using TensorPtr = std::shared_ptr<Tensor>;

/// Dense tensor (rank 1 or 2) with reverse-mode autodiff. Nodes created while
/// grad recording is on carry links to their parents and a backprop closure;
/// `backward` walks the graph in reverse topological order and accumulates
/// gradients. Values are doubles throughout; checkpoints narrow to f32.
class Tensor {
 public:
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily, same length as value
  bool requires_grad = false;

  std::vector<TensorPtr> parents;
  std::function<void(const Tensor&)> backprop;  // adds into parents' grads

  static TensorPtr scalar(double v, bool requires_grad = false);
  static TensorPtr vec(std::vector<double> v, bool requires_grad = false);
  static TensorPtr matrix(std::size_t rows, std::size_t cols, std::vector<double> v,
                          bool requires_grad = false);
  static TensorPtr zeros(std::vector<std::size_t> shape, bool requires_grad = false);

  std::size_t size() const { return value.size(); }
  std::size_t rank() const { return shape.size(); }
  bool is_scalar() const { return value.size() == 1 && shape.size() <= 1; }
  std::size_t rows() const;
  std::size_t cols() const;

  double& at(std::size_t i, std::size_t j) { return value[i * cols() + j]; }
  double at(std::size_t i, std::size_t j) const { return value[i * cols() + j]; }

  void ensure_grad();
  void zero_grad();
  std::string shape_str() const;
};

/// While alive, newly created ops do not record the autodiff graph
/// (inference mode). Nestable; thread-local.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

bool grad_recording();

/// Backpropagates from a scalar loss. Gradients accumulate: calling twice
/// without zeroing doubles them.
void backward(const TensorPtr& loss);

// ---- ops -------------------------------------------------------------
// Shape errors name both operand shapes.

TensorPtr add(const TensorPtr& a, const TensorPtr& b);
TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(const TensorPtr& a, const TensorPtr& b);  // elementwise
TensorPtr scale(const TensorPtr& a, double c);
TensorPtr one_minus(const TensorPtr& a);

TensorPtr matmul(const TensorPtr& a, const TensorPtr& b);  // {m,k}x{k,n} or {k}x{k,n}
TensorPtr matvec(const TensorPtr& a, const TensorPtr& v);  // {m,n}x{n} -> {m}
TensorPtr transpose(const TensorPtr& a);

/// Affine map x*W (+ bias broadcast over rows). x: {m,a} or {a}; W: {a,b}.
TensorPtr linear(const TensorPtr& x, const TensorPtr& w, const TensorPtr& bias = nullptr);

TensorPtr sigmoid(const TensorPtr& a);
TensorPtr tanh_op(const TensorPtr& a);
TensorPtr log_clamped(const TensorPtr& a, double floor);  // log(max(a, floor))

/// Row-wise softmax with max subtraction. Rank-1 input is one row.
/// NaN entries are an error.
TensorPtr softmax_rows(const TensorPtr& a);
/// Column-wise softmax (each column sums to 1).
TensorPtr softmax_cols(const TensorPtr& a);

TensorPtr concat_rows(const TensorPtr& a, const TensorPtr& b);  // stack {m,n},{p,n}
TensorPtr concat_cols(const TensorPtr& a, const TensorPtr& b);  // {m,n},{m,p}
TensorPtr concat_vec(const TensorPtr& a, const TensorPtr& b);   // {n},{p} -> {n+p}
TensorPtr concat_many(const std::vector<TensorPtr>& parts);     // rank-1 pieces -> one vector
TensorPtr stack_rows(const std::vector<TensorPtr>& rows);       // L x {n} -> {L,n}
TensorPtr row(const TensorPtr& a, std::size_t i);               // {m,n} -> {n}
TensorPtr slice_vec(const TensorPtr& a, std::size_t lo, std::size_t hi);  // {n} -> {hi-lo}

TensorPtr sum_rows(const TensorPtr& a);   // {m,n} -> {n}
TensorPtr mean_rows(const TensorPtr& a);  // {m,n} -> {n}
TensorPtr sum_all(const TensorPtr& a);    // -> scalar
TensorPtr dot(const TensorPtr& a, const TensorPtr& b);  // {n}.{n} -> scalar
TensorPtr pick(const TensorPtr& a, std::size_t i);      // {n} -> scalar

TensorPtr cumsum(const TensorPtr& a);   // prefix sums, {n}
TensorPtr rcumsum(const TensorPtr& a);  // suffix sums, {n}

/// Scales row i of the matrix by s[i].
TensorPtr scale_rows(const TensorPtr& m, const TensorPtr& s);
/// Adds s[i] to every entry of row i.
TensorPtr add_col_broadcast(const TensorPtr& m, const TensorPtr& s);
/// Adds the vector to every row.
TensorPtr add_row_broadcast(const TensorPtr& m, const TensorPtr& v);

/// Column-wise max over rows [lo, hi). Empty or out-of-range window is an error.
TensorPtr max_pool_window(const TensorPtr& a, std::size_t lo, std::size_t hi);

/// Gathers rows of an embedding table; gradients scatter-add back.
TensorPtr embed_rows(const TensorPtr& table, const std::vector<int>& ids);

}  // namespace murke
