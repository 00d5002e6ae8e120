#pragma once

#include <string>
#include <vector>

#include "murke/corpus.hpp"
#include "murke/dataset.hpp"
#include "murke/nn.hpp"
#include "murke/retrieval.hpp"
#include "murke/vocab.hpp"

namespace murke {

/// [CLS] question [SEP] document [SEP] as vocabulary ids; out-of-vocabulary
/// tokens map to UNK.
struct CrossInput {
  std::vector<int> ids;
  std::size_t sep1;  // position of the first SEP
  std::size_t sep2;  // position of the trailing SEP
};

CrossInput build_cross_input(const std::vector<std::string>& question_tokens,
                             const std::vector<std::string>& doc_tokens, const Vocab& vocab);

struct RerankerConfig {
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 32;
};

/// Semantic relevance scorer: a single-layer BiGRU reads the cross input;
/// the state at the CLS position goes through an affine layer and a
/// logistic squashing, so scores live in (0,1).
class RerankerModel {
 public:
  static RerankerModel init(const Vocab& vocab, const RerankerConfig& cfg, Rng& rng);

  /// Graph-building score node (for training).
  TensorPtr score_node(const std::vector<std::string>& question_tokens,
                       const std::vector<std::string>& doc_tokens) const;
  /// Inference-mode score in (0,1).
  double relevance(const std::vector<std::string>& question_tokens,
                   const std::vector<std::string>& doc_tokens) const;

  std::vector<NamedParam> parameters() const;
  const RerankerConfig& config() const { return cfg_; }
  const Vocab& vocab() const { return *vocab_; }

 private:
  const Vocab* vocab_ = nullptr;
  RerankerConfig cfg_;
  TensorPtr embed_;   // {V, e}
  BiGruParams enc_;   // e -> d
  TensorPtr head_w_;  // {2d}
  TensorPtr head_b_;  // {1}
};

/// Keeps candidates scoring strictly above th_r, ordered by score
/// descending (ties by id). When nothing clears the threshold, falls back
/// to the top max(1, n_min) by score.
std::vector<ScoredDoc> filter_by_threshold(std::vector<ScoredDoc> scored, double th_r,
                                           std::size_t n_min);

/// Scores every candidate and applies the threshold filter.
std::vector<ScoredDoc> filter_relevant(const RerankerModel& model, const Question& question,
                                       const std::vector<std::string>& candidate_ids,
                                       const Corpus& corpus, double th_r, std::size_t n_min,
                                       unsigned threads = 0);

/// Alternative to thresholding: the top-n candidates by score.
std::vector<ScoredDoc> filter_top_n(const RerankerModel& model, const Question& question,
                                    const std::vector<std::string>& candidate_ids,
                                    const Corpus& corpus, std::size_t top_n,
                                    unsigned threads = 0);

struct RerankExample {
  std::vector<std::string> question_tokens;
  std::vector<std::string> doc_tokens;
  bool relevant;
};

/// Binary cross-entropy training with per-example SGD updates in a fixed
/// order. Returns the mean loss per epoch. Needs at least one positive and
/// one negative example; lr = 0 leaves the parameters untouched.
std::vector<double> train_reranker(RerankerModel& model, const std::vector<RerankExample>& data,
                                   int epochs, double lr);

}  // namespace murke
