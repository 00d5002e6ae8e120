#pragma once

#include <utility>

#include "murke/model.hpp"
#include "murke/selection.hpp"

namespace murke {

struct QuestionAwareDoc {
  TensorPtr s;     // {N, 2d}, row j = beta_j * V_j
  TensorPtr beta;  // {N}, distribution over document tokens
};

/// beta_j = softmax_j sum_i U_i Wc V_j; S = beta-reweighted document rows.
QuestionAwareDoc question_aware_doc(const TensorPtr& u, const TensorPtr& v, const TensorPtr& wc);

struct SpanDistributions {
  TensorPtr p_s;  // {N}
  TensorPtr p_e;  // {N}
};

/// Start head reads S, end head reads the start head's states; both are
/// BiGRUs followed by a linear layer and a softmax over positions.
SpanDistributions span_distributions(const TensorPtr& s, const BiGruParams& span_start,
                                     const BiGruParams& span_end, const TensorPtr& w_s,
                                     const TensorPtr& w_e);

/// gamma_i = P(span started at or before i) * P(span ends at or after i)
///         = cumsum(p_s)_i * rcumsum(p_e)_i.
TensorPtr reading_attention(const SpanDistributions& p);

/// Row i scaled by gamma_i.
TensorPtr reweight_doc(const TensorPtr& v, const TensorPtr& gamma);

/// Windowed column max mapping {N,2d} to exactly {M,2d}: width ceil(N/M),
/// half-open windows clipped to N; trailing empty windows repeat the last
/// window's result.
TensorPtr dynamic_max_pool(const TensorPtr& vt, std::size_t m);

/// U' = U + G; advances the step counter.
QuestionState update_question(const QuestionState& state, const TensorPtr& g);

/// Argmax of p_s(s)*p_e(e) under s <= e, by exhaustive scan.
std::pair<std::size_t, std::size_t> extract_span(const SpanDistributions& p);

/// Whole reformulation chain for one step; keeps the intermediate pieces
/// for the step trace.
struct ReformulationResult {
  QuestionState next;
  SpanDistributions spans;
  TensorPtr gamma;
  std::pair<std::size_t, std::size_t> span;
};

ReformulationResult reformulate(const MurkeModel& model, const QuestionState& state,
                                const TensorPtr& v);

}  // namespace murke
