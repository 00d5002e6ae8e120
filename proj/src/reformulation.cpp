#include "murke/reformulation.hpp"

namespace murke {

QuestionAwareDoc question_aware_doc(const TensorPtr& u, const TensorPtr& v, const TensorPtr& wc) {
  if (u->rank() != 2 || v->rank() != 2 || u->shape[1] != v->shape[1])
    throw Error("question_aware_doc: shape mismatch " + u->shape_str() + " vs " + v->shape_str());
  // sum_i U_i Wc V_j = (row-sum of U) Wc . V_j
  auto u_sum = sum_rows(u);                     // {2d}
  auto z = matmul(u_sum, wc);                   // {2d}
  QuestionAwareDoc out;
  out.beta = softmax_rows(matvec(v, z));        // {N}
  out.s = scale_rows(v, out.beta);
  return out;
}

SpanDistributions span_distributions(const TensorPtr& s, const BiGruParams& span_start,
                                     const BiGruParams& span_end, const TensorPtr& w_s,
                                     const TensorPtr& w_e) {
  auto y_s = bigru(s, span_start);
  auto y_e = bigru(y_s, span_end);
  SpanDistributions out;
  out.p_s = softmax_rows(matvec(y_s, w_s));
  out.p_e = softmax_rows(matvec(y_e, w_e));
  return out;
}

TensorPtr reading_attention(const SpanDistributions& p) {
  if (p.p_s->rank() != 1 || p.p_s->shape != p.p_e->shape)
    throw Error("reading_attention: shape mismatch " + p.p_s->shape_str() + " vs " +
                p.p_e->shape_str());
  return mul(cumsum(p.p_s), rcumsum(p.p_e));
}

TensorPtr reweight_doc(const TensorPtr& v, const TensorPtr& gamma) {
  return scale_rows(v, gamma);
}

TensorPtr dynamic_max_pool(const TensorPtr& vt, std::size_t m) {
  if (vt->rank() != 2 || vt->shape[0] == 0)
    throw Error("dynamic_max_pool: need non-empty rank-2 input, got " + vt->shape_str());
  if (m == 0) throw Error("dynamic_max_pool: output rows must be >= 1");
  const std::size_t n = vt->shape[0];
  const std::size_t w = (n + m - 1) / m;  // ceil(N/M)
  std::vector<TensorPtr> rows;
  rows.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i * w;
    if (lo >= n) {
      rows.push_back(rows.back());  // trailing windows repeat the last result
      continue;
    }
    const std::size_t hi = std::min(lo + w, n);
    rows.push_back(max_pool_window(vt, lo, hi));
  }
  return stack_rows(rows);
}

QuestionState update_question(const QuestionState& state, const TensorPtr& g) {
  if (state.u->shape != g->shape)
    throw Error("update_question: shape mismatch " + state.u->shape_str() + " vs " +
                g->shape_str());
  return QuestionState{add(state.u, g), state.step + 1};
}

std::pair<std::size_t, std::size_t> extract_span(const SpanDistributions& p) {
  const std::size_t n = p.p_s->size();
  std::size_t best_s = 0, best_e = 0;
  double best = -1.0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t e = s; e < n; ++e) {
      const double v = p.p_s->value[s] * p.p_e->value[e];
      if (v > best) {
        best = v;
        best_s = s;
        best_e = e;
      }
    }
  }
  return {best_s, best_e};
}

ReformulationResult reformulate(const MurkeModel& model, const QuestionState& state,
                                const TensorPtr& v) {
  ReformulationResult out;
  auto aware = question_aware_doc(state.u, v, model.wc);
  out.spans = span_distributions(aware.s, model.span_start, model.span_end, model.w_s, model.w_e);
  out.gamma = reading_attention(out.spans);
  out.span = extract_span(out.spans);
  auto reweighted = reweight_doc(v, out.gamma);
  auto evidence = dynamic_max_pool(reweighted, state.u->shape[0]);
  out.next = update_question(state, evidence);
  return out;
}

}  // namespace murke
