#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "murke/corpus.hpp"
#include "murke/dataset.hpp"

namespace murke {

/// Synthetic multi-hop benchmark generator. Every question is answerable
/// only by following its whole document chain: the bridge entity never
/// appears in the question, and no single document carries both the
/// question's key terms and the answer.
struct SynthConfig {
  std::size_t n_questions = 50;
  int hops = 2;  // 2 or 3
  std::size_t vocab_size = 50000;
  std::size_t distractors = 5;
  std::size_t options = 4;
  std::uint64_t seed = 7;
};

struct SynthData {
  std::vector<Document> docs;
  std::vector<Question> questions;
  std::map<std::string, std::vector<std::string>> chains;  // qid -> chain doc ids in order
};

SynthData generate_synthetic(const SynthConfig& cfg);

/// Writes corpus.jsonl, dataset.jsonl and chains.jsonl (plus
/// train.jsonl/dev.jsonl when n_dev > 0; the last n_dev questions are the
/// dev split). Same config -> byte-identical files.
void write_synthetic(const SynthData& data, const std::string& out_dir, std::size_t n_dev = 0);

std::map<std::string, std::vector<std::string>> load_chains(const std::string& path);

/// Questions for which some single document contains every question key
/// term plus the answer option's tokens. The generator must keep this at
/// zero.
std::vector<std::string> single_doc_answerable(const SynthData& data, std::size_t key_terms);

/// Fraction of traced questions whose selected doc ids, in order, equal
/// the gold chain. Unknown qids are an error.
double chain_recovery_rate(const std::map<std::string, std::vector<std::string>>& traces,
                           const std::map<std::string, std::vector<std::string>>& chains);

}  // namespace murke
