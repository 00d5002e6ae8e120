#pragma once

#include <string>
#include <vector>

#include "murke/nn.hpp"
#include "murke/vocab.hpp"

namespace murke {

enum class FusionMode { kNone, kCon, kAvg, kBil };

FusionMode fusion_from_string(const std::string& s);
std::string fusion_to_string(FusionMode m);

struct ModelConfig {
  std::size_t embed_dim = 300;
  std::size_t hidden_dim = 200;
  std::size_t image_dim = 0;  // 0 = questions carry no image vectors
  FusionMode fusion = FusionMode::kNone;
  bool share_encoders = true;  // question encoder reuses the document encoder
};

/// All trainable state of the reasoning model. One embedding table feeds
/// the question, document, and option encoders.
struct MurkeModel {
  ModelConfig cfg;
  const Vocab* vocab = nullptr;

  TensorPtr embed;  // {V, e}

  // selection
  BiGruParams doc_enc;             // e -> d
  BiGruParams q_enc;               // unused when share_encoders
  TensorPtr attn_w_doc, attn_ws_doc;  // {2d}, {2d,2d}
  TensorPtr attn_w_q, attn_ws_q;      // unused when share_encoders
  // fusion (allocated only when image_dim > 0)
  TensorPtr img_proj;  // {k, 2d} for avg
  TensorPtr con_w;     // {4d, 2d} for con
  TensorPtr bil_w;     // {2d, k} for bil

  // reformulation
  TensorPtr wc;  // {2d, 2d}
  BiGruParams span_start, span_end;  // 2d -> d
  TensorPtr w_s, w_e;                // {2d}

  // entailment
  BiGruParams hyp_enc;    // e -> d, seeded from the question state
  BiGruParams match_enc;  // 4d -> d
  TensorPtr cls_w;        // {2d}
  TensorPtr cls_b;        // {1}

  static MurkeModel init(const Vocab& vocab, const ModelConfig& cfg, Rng& rng);
  std::vector<NamedParam> parameters() const;

  const BiGruParams& question_encoder() const { return cfg.share_encoders ? doc_enc : q_enc; }
  const TensorPtr& question_attn_w() const { return cfg.share_encoders ? attn_w_doc : attn_w_q; }
  const TensorPtr& question_attn_ws() const {
    return cfg.share_encoders ? attn_ws_doc : attn_ws_q;
  }
};

}  // namespace murke
