#include "murke/entailment.hpp"

namespace murke {

TensorPtr encode_hypothesis(const MurkeModel& model, const QuestionState& state,
                            const std::vector<std::string>& option_tokens) {
  if (option_tokens.empty()) throw Error("encode_hypothesis: empty option");
  const std::size_t d = model.cfg.hidden_dim;

  // mean-pooled U seeds the option encoder: first d coords forward, last d backward
  auto u_mean = mean_rows(state.u);
  auto emb = embed_rows(model.embed, model.vocab->ids(option_tokens));
  auto states = bigru(emb, model.hyp_enc, slice_vec(u_mean, 0, d), slice_vec(u_mean, d, 2 * d));
  return concat_rows(state.u, states);
}

TensorPtr premise_attention(const TensorPtr& premise, const TensorPtr& hypothesis) {
  if (premise->rank() != 2 || hypothesis->rank() != 2 ||
      premise->shape[1] != hypothesis->shape[1])
    throw Error("premise_attention: shape mismatch " + premise->shape_str() + " vs " +
                hypothesis->shape_str());
  auto e = matmul(premise, transpose(hypothesis));  // {K, J}
  auto delta = softmax_cols(e);                     // columns sum to 1 over premise rows
  return matmul(transpose(delta), premise);         // {J, 2d}
}

TensorPtr match_and_score(const MurkeModel& model, const TensorPtr& attended,
                          const TensorPtr& hypothesis) {
  if (attended->shape != hypothesis->shape)
    throw Error("match_and_score: shape mismatch " + attended->shape_str() + " vs " +
                hypothesis->shape_str());
  auto m = concat_cols(attended, hypothesis);  // {J, 4d}
  auto states = bigru(m, model.match_enc);     // {J, 2d}
  auto pooled = max_pool_window(states, 0, states->shape[0]);
  return add(dot(pooled, model.cls_w), model.cls_b);
}

TensorPtr entail_all(const MurkeModel& model, const TensorPtr& premise,
                     const QuestionState& state,
                     const std::vector<std::vector<std::string>>& options) {
  if (options.size() < 2) throw Error("entail_all: need at least 2 options");
  std::vector<TensorPtr> logits;
  logits.reserve(options.size());
  for (const auto& opt : options) {
    auto h = encode_hypothesis(model, state, opt);
    auto a = premise_attention(premise, h);
    logits.push_back(match_and_score(model, a, h));
  }
  return softmax_rows(concat_many(logits));
}

}  // namespace murke
