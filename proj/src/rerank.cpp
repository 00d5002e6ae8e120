#include "murke/rerank.hpp"

#include <algorithm>
#include <cmath>

namespace murke {

CrossInput build_cross_input(const std::vector<std::string>& question_tokens,
                             const std::vector<std::string>& doc_tokens, const Vocab& vocab) {
  CrossInput in;
  in.ids.reserve(question_tokens.size() + doc_tokens.size() + 3);
  in.ids.push_back(Vocab::kCls);
  for (const auto& t : question_tokens) in.ids.push_back(vocab.id(t));
  in.sep1 = in.ids.size();
  in.ids.push_back(Vocab::kSep);
  for (const auto& t : doc_tokens) in.ids.push_back(vocab.id(t));
  in.sep2 = in.ids.size();
  in.ids.push_back(Vocab::kSep);
  return in;
}

RerankerModel RerankerModel::init(const Vocab& vocab, const RerankerConfig& cfg, Rng& rng) {
  RerankerModel m;
  m.vocab_ = &vocab;
  m.cfg_ = cfg;
  m.embed_ = init_embedding(vocab.size(), cfg.embed_dim, rng);
  m.enc_ = BiGruParams::init(cfg.embed_dim, cfg.hidden_dim, rng);
  m.head_w_ = init_vector(2 * cfg.hidden_dim, rng);
  m.head_b_ = Tensor::vec({0.0}, true);
  return m;
}

TensorPtr RerankerModel::score_node(const std::vector<std::string>& question_tokens,
                                    const std::vector<std::string>& doc_tokens) const {
  CrossInput in = build_cross_input(question_tokens, doc_tokens, *vocab_);
  auto emb = embed_rows(embed_, in.ids);
  auto states = bigru(emb, enc_);
  auto cls_state = row(states, 0);
  auto logit = add(dot(cls_state, head_w_), head_b_);
  return sigmoid(logit);
}

double RerankerModel::relevance(const std::vector<std::string>& question_tokens,
                                const std::vector<std::string>& doc_tokens) const {
  NoGradGuard ng;
  return score_node(question_tokens, doc_tokens)->value[0];
}

std::vector<NamedParam> RerankerModel::parameters() const {
  std::vector<NamedParam> out;
  out.push_back({"rerank.embed", embed_});
  enc_.collect("rerank.enc", out);
  out.push_back({"rerank.head_w", head_w_});
  out.push_back({"rerank.head_b", head_b_});
  return out;
}

std::vector<ScoredDoc> filter_by_threshold(std::vector<ScoredDoc> scored, double th_r,
                                           std::size_t n_min) {
  if (th_r < 0.0 || th_r > 1.0) throw Error("filter_by_threshold: th_r must be in [0,1]");
  std::sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  std::vector<ScoredDoc> kept;
  for (const auto& sd : scored) {
    if (sd.score > th_r) kept.push_back(sd);
  }
  if (kept.empty()) {
    const std::size_t n = std::min(scored.size(), std::max<std::size_t>(1, n_min));
    kept.assign(scored.begin(), scored.begin() + n);
  }
  return kept;
}

namespace {

std::vector<ScoredDoc> score_candidates(const RerankerModel& model, const Question& question,
                                        const std::vector<std::string>& candidate_ids,
                                        const Corpus& corpus, unsigned threads) {
  std::vector<ScoredDoc> scored(candidate_ids.size());
  parallel_for(
      candidate_ids.size(),
      [&](std::size_t i) {
        NoGradGuard ng;
        const Document& doc = corpus.document(candidate_ids[i]);
        scored[i] = {doc.doc_id, model.relevance(question.tokens, doc.tokens)};
      },
      threads);
  return scored;
}

}  // namespace

std::vector<ScoredDoc> filter_relevant(const RerankerModel& model, const Question& question,
                                       const std::vector<std::string>& candidate_ids,
                                       const Corpus& corpus, double th_r, std::size_t n_min,
                                       unsigned threads) {
  return filter_by_threshold(score_candidates(model, question, candidate_ids, corpus, threads),
                             th_r, n_min);
}

std::vector<ScoredDoc> filter_top_n(const RerankerModel& model, const Question& question,
                                    const std::vector<std::string>& candidate_ids,
                                    const Corpus& corpus, std::size_t top_n, unsigned threads) {
  auto scored = score_candidates(model, question, candidate_ids, corpus, threads);
  std::sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (scored.size() > top_n) scored.resize(std::max<std::size_t>(1, top_n));
  return scored;
}

std::vector<double> train_reranker(RerankerModel& model, const std::vector<RerankExample>& data,
                                   int epochs, double lr) {
  if (data.empty()) throw Error("train_reranker: empty dataset");
  bool has_pos = false, has_neg = false;
  for (const auto& ex : data) (ex.relevant ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw Error("train_reranker: need at least one positive and one negative example");

  auto params = tensors_of(model.parameters());
  SgdSchedule sched{lr, 0.0, 0};
  std::vector<double> curve;
  curve.reserve(epochs);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    double total = 0.0;
    for (const auto& ex : data) {
      zero_grads(params);
      auto s = model.score_node(ex.question_tokens, ex.doc_tokens);
      TensorPtr nll = ex.relevant ? scale(log_clamped(s, 1e-12), -1.0)
                                  : scale(log_clamped(one_minus(s), 1e-12), -1.0);
      total += nll->value[0];
      if (lr > 0.0) {
        backward(nll);
        sgd_step(params, sched);
      }
    }
    curve.push_back(total / static_cast<double>(data.size()));
  }
  return curve;
}

}  // namespace murke
