#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "murke/corpus.hpp"
#include "murke/dataset.hpp"
#include "murke/entailment.hpp"
#include "murke/model.hpp"
#include "murke/reformulation.hpp"
#include "murke/selection.hpp"

namespace murke {

/// Per-step interpretability record.
struct StepTrace {
  int step = 0;
  std::string doc_id;
  std::vector<double> p_s, p_e, gamma;
  std::size_t span_start = 0, span_end = 0;
  std::string span_text;
  std::vector<double> choice_scores;  // sums to 1 over options
};

struct ReasonerOutput {
  std::vector<StepTrace> traces;
  std::vector<double> final_scores;  // mean over steps
  int predicted_index = 0;
  bool truncated = false;  // T exceeded |D_N| with exclusion on

  // graph handles kept for the training loss
  std::vector<TensorPtr> step_score_nodes;
  TensorPtr final_node;
};

struct ReasonOptions {
  int steps = 3;
  bool exclude_previous = true;
  bool parallel_step = false;  // run reformulation and entailment concurrently
};

/// Runs Algorithm 1 for one question over its supporting documents
/// (rerank order). D_N must be non-empty.
ReasonerOutput reason(const MurkeModel& model, const Question& question,
                      const std::vector<const Document*>& dn, const ReasonOptions& opts);

/// Mean over steps; the result of valid per-step distributions is a
/// distribution again.
std::vector<double> aggregate_scores(const std::vector<std::vector<double>>& step_scores);
TensorPtr aggregate_node(const std::vector<TensorPtr>& step_scores);

/// -log of the aggregated gold score, clamped at 1e-12.
TensorPtr loss_node(const std::vector<TensorPtr>& step_scores, int gold_index);

/// Argmax; ties go to the lowest index.
int predict(const std::vector<double>& final_scores);

/// Writes the trace JSON (question, per-step evidence, prediction).
void export_trace(const ReasonerOutput& output, const Question& question,
                  const std::string& path);

// ---- training / evaluation -------------------------------------------------

/// A question with its supporting set resolved (retrieval + rerank done).
struct PreparedQuestion {
  const Question* question = nullptr;
  std::vector<const Document*> dn;
};

struct EpochMetric {
  int epoch = 0;
  int steps_used = 1;  // T during this epoch (staged schedule)
  double train_loss = 0.0;
  double dev_accuracy = 0.0;
};

struct TrainOptions {
  int steps = 3;          // target T
  int stage1_epochs = 0;  // leading epochs run at T=1 before the target T
  int epochs = 50;        // total epochs across both stages
  double lr = 0.015;
  double decay = 0.05;
  bool exclude_previous = true;
  bool parallel_step = false;
  std::uint64_t shuffle_seed = 1;
  unsigned threads = 0;
};

/// SGD over the training questions (staged schedule: T=1 first, then the
/// configured T), logging loss and dev accuracy per epoch. Every question
/// needs a gold label.
std::vector<EpochMetric> train_model(MurkeModel& model, const std::vector<PreparedQuestion>& train,
                                     const std::vector<PreparedQuestion>& dev,
                                     const TrainOptions& opts);

struct CategoryMetric {
  std::size_t total = 0;
  std::size_t correct = 0;
  long points = 0;
};

struct EvalResult {
  double accuracy = 0.0;
  long points = 0;  // 3 per right answer, -1 per wrong one
  std::map<std::string, CategoryMetric> by_category;
  std::vector<int> predictions;
  std::vector<ReasonerOutput> outputs;
};

EvalResult evaluate(const MurkeModel& model, const std::vector<PreparedQuestion>& questions,
                    const ReasonOptions& opts, unsigned threads = 0, bool keep_outputs = false);

}  // namespace murke
