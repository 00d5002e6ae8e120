#pragma once

#include <optional>
#include <string>
#include <vector>

#include "murke/corpus.hpp"

namespace murke {

/// One multiple-choice question: context+question text, h answer options,
/// optional gold index and optional precomputed image feature vector.
struct Question {
  std::string qid;
  std::string category;
  std::string text;
  std::vector<std::string> tokens;
  std::vector<std::string> option_texts;
  std::vector<std::vector<std::string>> option_tokens;
  std::optional<int> answer_idx;
  std::vector<double> image_vec;  // empty when the question has no image

  std::size_t num_options() const { return option_texts.size(); }
};

/// Loads a dataset JSONL file:
/// {"qid","category","question","options":[...],"answer_idx"?,"image_vec"?}.
/// Unknown keys are ignored; malformed lines name the line number.
std::vector<Question> load_dataset(const std::string& path);

const Question& find_question(const std::vector<Question>& qs, const std::string& qid);

}  // namespace murke
