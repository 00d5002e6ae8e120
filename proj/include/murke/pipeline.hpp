#pragma once

#include <map>
#include <string>
#include <vector>

#include "murke/config.hpp"
#include "murke/corpus.hpp"
#include "murke/dataset.hpp"
#include "murke/model.hpp"
#include "murke/reasoner.hpp"
#include "murke/rerank.hpp"
#include "murke/retrieval.hpp"
#include "murke/synth.hpp"
#include "murke/vocab.hpp"

namespace murke {

using ChainMap = std::map<std::string, std::vector<std::string>>;

/// Token-level candidates for one question (the union over per-option
/// queries).
CandidateSet token_candidates(const Question& q, const Corpus& corpus, const RunConfig& cfg,
                              const Stoplist& stop = Stoplist::builtin());

/// Relevance training pairs from chain ground truth: chain documents are
/// positive, the other token-level candidates negative.
std::vector<RerankExample> make_rerank_examples(const std::vector<Question>& questions,
                                                const Corpus& corpus, const ChainMap& chains,
                                                const RunConfig& cfg);

/// Retrieval + semantic filter for each question; documents arrive in
/// rerank order, ready for the reasoner.
std::vector<PreparedQuestion> prepare_questions(const std::vector<Question>& questions,
                                                const Corpus& corpus,
                                                const RerankerModel& reranker,
                                                const RunConfig& cfg);

struct TrainedPipeline {
  Vocab vocab;
  RerankerModel reranker;
  MurkeModel model;
  std::vector<double> rerank_loss;
  std::vector<EpochMetric> epochs;
};

/// End-to-end training: vocabulary, reranker (when chains are given),
/// supporting-set preparation, then the staged reasoner schedule.
TrainedPipeline train_pipeline(const Corpus& corpus, const std::vector<Question>& train,
                               const std::vector<Question>& dev, const ChainMap& chains,
                               const RunConfig& cfg);

/// model.ckpt, reranker.ckpt and metrics.json under out_dir.
void save_pipeline(const TrainedPipeline& p, const RunConfig& cfg, const std::string& out_dir);

struct LoadedPipeline {
  Vocab vocab;
  RerankerModel reranker;
  MurkeModel model;
};

/// Rebuilds the vocabulary from the same corpus/datasets and loads both
/// checkpoints; refuses to load against a different vocabulary.
LoadedPipeline load_pipeline(const Corpus& corpus,
                             const std::vector<const std::vector<Question>*>& question_sets,
                             const std::string& dir, const RunConfig& cfg);

/// Optional plain-text embedding file: `word v1 .. v_e` per line; known
/// words overwrite their rows. Returns the number of words applied.
std::size_t load_embedding_file(const TensorPtr& table, const Vocab& vocab,
                                const std::string& path, std::size_t embed_dim);

struct GridRow {
  int steps;
  double dev_accuracy;
};

/// Trains and evaluates once per T in [t_min, t_max], same seed
/// throughout.
std::vector<GridRow> grid_search_steps(const Corpus& corpus, const std::vector<Question>& train,
                                       const std::vector<Question>& dev, const ChainMap& chains,
                                       const RunConfig& cfg, int t_min, int t_max);

}  // namespace murke
