#pragma once

#include <vector>

#include "murke/model.hpp"
#include "murke/selection.hpp"

namespace murke {

/// Hypothesis encoding: the mean-pooled question state seeds the BiGRU
/// (first d coordinates the forward direction, last d the backward) which
/// reads the option tokens; the question-state rows are stacked on top, so
/// H is {M+R, 2d}. Empty options are an error.
TensorPtr encode_hypothesis(const MurkeModel& model, const QuestionState& state,
                            const std::vector<std::string>& option_tokens);

/// Premise-to-hypothesis attention: e_ij = P_i . H_j, delta normalized over
/// premise rows (columns sum to 1), A_j = sum_i delta_ij P_i.
TensorPtr premise_attention(const TensorPtr& premise, const TensorPtr& hypothesis);

/// Matching layer: BiGRU over [A_j ; H_j], column max over its states,
/// affine to a scalar logit.
TensorPtr match_and_score(const MurkeModel& model, const TensorPtr& attended,
                          const TensorPtr& hypothesis);

/// Entailment probability for every option: shared model applied per
/// option, softmax over the h logits. Needs h >= 2.
TensorPtr entail_all(const MurkeModel& model, const TensorPtr& premise,
                     const QuestionState& state,
                     const std::vector<std::vector<std::string>>& options);

}  // namespace murke
