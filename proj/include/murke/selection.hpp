#pragma once

#include <set>
#include <string>
#include <vector>

#include "murke/dataset.hpp"
#include "murke/model.hpp"

namespace murke {

/// Contextual encoding: embed tokens and run the BiGRU, {L, 2d}.
/// Empty token lists are an error.
TensorPtr encode_sequence(const std::vector<std::string>& tokens, const TensorPtr& embed,
                          const Vocab& vocab, const BiGruParams& enc);

struct SelfAttention {
  TensorPtr attended;  // {L, 2d}, row j = alpha_j * (ctx_j Ws)
  TensorPtr alpha;     // {L}, sums to 1
};

/// Token self-attention: alpha = softmax over positions of w.ctx_j, each
/// row reweighted and projected by Ws.
SelfAttention self_attend(const TensorPtr& ctx, const TensorPtr& w, const TensorPtr& ws);

/// Document encoding cached per question; not updated across steps.
struct EncodedDoc {
  std::string doc_id;
  TensorPtr enc;  // {N, 2d}
};

EncodedDoc encode_document(const MurkeModel& model, const Document& doc);

/// Question embedding E_Q (self-attended contextual states).
TensorPtr encode_question(const MurkeModel& model, const std::vector<std::string>& tokens);

/// Latent question representation, reshaped by each reasoning step.
struct QuestionState {
  TensorPtr u;  // {M, 2d}
  int step = 0;
};

/// U(0) from E_Q and the optional image vector.
///   none: E_Q unchanged        avg: (E_Q + broadcast proj(img)) / 2
///   con:  [E_Q_i ; proj] W      bil: E_Q_i + (E_Q_i W_b img) broadcast
QuestionState init_question_state(const MurkeModel& model, const TensorPtr& e_q,
                                  const std::vector<double>& image_vec, FusionMode mode);

/// Relevance of a document to the question state: inner product of the
/// token-mean pooled vectors.
double score_document(const TensorPtr& u, const TensorPtr& e_d);

/// Highest-scoring non-excluded document; ties break toward the smaller
/// doc_id. All-excluded is an error.
std::size_t select_top1(const QuestionState& state, const std::vector<EncodedDoc>& docs,
                        const std::set<std::string>& exclude);

}  // namespace murke
