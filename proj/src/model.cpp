#include "murke/model.hpp"

namespace murke {

FusionMode fusion_from_string(const std::string& s) {
  if (s == "none") return FusionMode::kNone;
  if (s == "con") return FusionMode::kCon;
  if (s == "avg") return FusionMode::kAvg;
  if (s == "bil") return FusionMode::kBil;
  throw Error("unknown fusion mode \"" + s + "\" (expected none|con|avg|bil)");
}

std::string fusion_to_string(FusionMode m) {
  switch (m) {
    case FusionMode::kNone: return "none";
    case FusionMode::kCon: return "con";
    case FusionMode::kAvg: return "avg";
    case FusionMode::kBil: return "bil";
  }
  return "none";
}

MurkeModel MurkeModel::init(const Vocab& vocab, const ModelConfig& cfg, Rng& rng) {
  MurkeModel m;
  m.cfg = cfg;
  m.vocab = &vocab;
  const std::size_t e = cfg.embed_dim;
  const std::size_t d = cfg.hidden_dim;
  const std::size_t d2 = 2 * d;

  m.embed = init_embedding(vocab.size(), e, rng);

  m.doc_enc = BiGruParams::init(e, d, rng);
  m.attn_w_doc = init_vector(d2, rng);
  m.attn_ws_doc = init_weight(d2, d2, rng);
  if (!cfg.share_encoders) {
    m.q_enc = BiGruParams::init(e, d, rng);
    m.attn_w_q = init_vector(d2, rng);
    m.attn_ws_q = init_weight(d2, d2, rng);
  }

  if (cfg.image_dim > 0) {
    m.img_proj = init_weight(cfg.image_dim, d2, rng);
    m.con_w = init_weight(2 * d2, d2, rng);
    m.bil_w = init_weight(d2, cfg.image_dim, rng);
  }

  m.wc = init_weight(d2, d2, rng);
  m.span_start = BiGruParams::init(d2, d, rng);
  m.span_end = BiGruParams::init(d2, d, rng);
  m.w_s = init_vector(d2, rng);
  m.w_e = init_vector(d2, rng);

  m.hyp_enc = BiGruParams::init(e, d, rng);
  m.match_enc = BiGruParams::init(2 * d2, d, rng);
  m.cls_w = init_vector(d2, rng);
  m.cls_b = Tensor::vec({0.0}, true);
  return m;
}

std::vector<NamedParam> MurkeModel::parameters() const {
  std::vector<NamedParam> out;
  out.push_back({"embed", embed});
  doc_enc.collect("sel.doc_enc", out);
  out.push_back({"sel.attn_w_doc", attn_w_doc});
  out.push_back({"sel.attn_ws_doc", attn_ws_doc});
  if (!cfg.share_encoders) {
    q_enc.collect("sel.q_enc", out);
    out.push_back({"sel.attn_w_q", attn_w_q});
    out.push_back({"sel.attn_ws_q", attn_ws_q});
  }
  if (cfg.image_dim > 0) {
    out.push_back({"sel.img_proj", img_proj});
    out.push_back({"sel.con_w", con_w});
    out.push_back({"sel.bil_w", bil_w});
  }
  out.push_back({"ref.wc", wc});
  span_start.collect("ref.span_start", out);
  span_end.collect("ref.span_end", out);
  out.push_back({"ref.w_s", w_s});
  out.push_back({"ref.w_e", w_e});
  hyp_enc.collect("ent.hyp_enc", out);
  match_enc.collect("ent.match_enc", out);
  out.push_back({"ent.cls_w", cls_w});
  out.push_back({"ent.cls_b", cls_b});
  return out;
}

}  // namespace murke
