#include "murke/selection.hpp"

namespace murke {

TensorPtr encode_sequence(const std::vector<std::string>& tokens, const TensorPtr& embed,
                          const Vocab& vocab, const BiGruParams& enc) {
  if (tokens.empty()) throw Error("encode_sequence: empty token list");
  auto emb = embed_rows(embed, vocab.ids(tokens));
  return bigru(emb, enc);
}

SelfAttention self_attend(const TensorPtr& ctx, const TensorPtr& w, const TensorPtr& ws) {
  if (ctx->rank() != 2 || w->rank() != 1 || ctx->shape[1] != w->size())
    throw Error("self_attend: shape mismatch " + ctx->shape_str() + " vs " + w->shape_str());
  SelfAttention out;
  out.alpha = softmax_rows(matvec(ctx, w));
  out.attended = scale_rows(matmul(ctx, ws), out.alpha);
  return out;
}

EncodedDoc encode_document(const MurkeModel& model, const Document& doc) {
  auto ctx = encode_sequence(doc.tokens, model.embed, *model.vocab, model.doc_enc);
  auto att = self_attend(ctx, model.attn_w_doc, model.attn_ws_doc);
  return EncodedDoc{doc.doc_id, att.attended};
}

TensorPtr encode_question(const MurkeModel& model, const std::vector<std::string>& tokens) {
  auto ctx = encode_sequence(tokens, model.embed, *model.vocab, model.question_encoder());
  auto att = self_attend(ctx, model.question_attn_w(), model.question_attn_ws());
  return att.attended;
}

QuestionState init_question_state(const MurkeModel& model, const TensorPtr& e_q,
                                  const std::vector<double>& image_vec, FusionMode mode) {
  if (mode == FusionMode::kNone) return QuestionState{e_q, 0};
  if (image_vec.empty())
    throw Error("init_question_state: fusion mode \"" + fusion_to_string(mode) +
                "\" needs an image vector");
  if (model.cfg.image_dim == 0 || image_vec.size() != model.cfg.image_dim)
    throw Error("init_question_state: image vector length " + std::to_string(image_vec.size()) +
                " does not match configured image_dim " + std::to_string(model.cfg.image_dim));

  auto img = Tensor::vec(image_vec);
  switch (mode) {
    case FusionMode::kAvg: {
      auto proj = matmul(img, model.img_proj);  // {2d}
      return QuestionState{scale(add_row_broadcast(e_q, proj), 0.5), 0};
    }
    case FusionMode::kCon: {
      auto proj = matmul(img, model.img_proj);  // {2d}
      std::vector<TensorPtr> rows_out;
      const std::size_t m = e_q->shape[0];
      rows_out.reserve(m);
      for (std::size_t i = 0; i < m; ++i)
        rows_out.push_back(matmul(concat_vec(row(e_q, i), proj), model.con_w));
      return QuestionState{stack_rows(rows_out), 0};
    }
    case FusionMode::kBil: {
      // s_i = E_Q_i W_b img, added to every entry of row i
      auto s = matvec(matmul(e_q, model.bil_w), img);  // {M}
      return QuestionState{add_col_broadcast(e_q, s), 0};
    }
    default:
      break;
  }
  throw Error("init_question_state: unsupported fusion mode");
}

double score_document(const TensorPtr& u, const TensorPtr& e_d) {
  NoGradGuard ng;
  auto pooled_u = mean_rows(u);
  auto pooled_d = mean_rows(e_d);
  return dot(pooled_u, pooled_d)->value[0];
}

std::size_t select_top1(const QuestionState& state, const std::vector<EncodedDoc>& docs,
                        const std::set<std::string>& exclude) {
  std::size_t best = docs.size();
  double best_score = 0.0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (exclude.count(docs[i].doc_id)) continue;
    const double s = score_document(state.u, docs[i].enc);
    if (best == docs.size() || s > best_score ||
        (s == best_score && docs[i].doc_id < docs[best].doc_id)) {
      best = i;
      best_score = s;
    }
  }
  if (best == docs.size()) throw Error("select_top1: every document is excluded");
  return best;
}

}  // namespace murke
