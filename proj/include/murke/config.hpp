#pragma once

#include <cstdint>
#include <string>

#include "murke/common.hpp"

namespace murke {

/// Every knob of the pipeline plus file paths. Config files are flat
/// `key = value` UTF-8 text; keys match the field names below and unknown
/// keys are rejected by name. Command-line flags override file values.
struct RunConfig {
  // reasoning
  int T = 3;
  double lr = 0.015;
  double decay = 0.05;
  int epochs = 50;
  int stage1_epochs = -1;  // -1: epochs/4 when T > 1, else 0
  double th_r = 0.9;
  std::size_t topK = 100;
  std::size_t key_terms = 8;
  std::size_t n_min = 5;
  std::string fusion = "none";
  std::uint64_t seed = 7;
  bool exclusion = true;
  bool parallel_step = false;

  // model dimensions
  std::size_t embed_dim = 300;
  std::size_t hidden_dim = 200;
  std::size_t image_dim = 0;
  bool share_encoders = true;

  // reranker
  std::size_t rerank_embed_dim = 64;
  std::size_t rerank_hidden_dim = 32;
  int rerank_epochs = 12;
  double rerank_lr = 0.05;
  std::string rerank_mode = "threshold";  // threshold | topn
  std::size_t top_n = 30;

  // misc
  unsigned threads = 0;       // 0 = hardware concurrency
  std::string embed_file;     // optional plain-text embeddings
  std::string stoplist_file;  // optional stoplist override

  // paths (CLI flags usually fill these)
  std::string corpus, dataset, train, dev, chains, checkpoint, out_dir;

  int effective_stage1_epochs() const {
    if (stage1_epochs >= 0) return stage1_epochs;
    return T > 1 ? std::max(1, epochs / 4) : 0;
  }

  /// Loads `key = value` lines over the current values. '#' starts a
  /// comment; blank lines are skipped; unknown keys are an error naming
  /// the key.
  void load_file(const std::string& path);
  /// Applies one key/value pair (shared by file loading and tests).
  void set(const std::string& key, const std::string& value);
};

}  // namespace murke
