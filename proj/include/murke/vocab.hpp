#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "murke/corpus.hpp"
#include "murke/dataset.hpp"

namespace murke {

/// Token -> id mapping shared by the reranker and the reasoning model.
/// Ids 0..2 are reserved (UNK, CLS, SEP); real tokens follow in sorted
/// order, so the same corpus+datasets always produce the same table.
class Vocab {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kCls = 1;
  static constexpr int kSep = 2;
  static constexpr int kReserved = 3;

  static Vocab build(const Corpus& corpus, const std::vector<const std::vector<Question>*>& sets);

  int id(const std::string& token) const;
  std::vector<int> ids(const std::vector<std::string>& tokens) const;
  std::size_t size() const { return kReserved + tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// FNV-1a over the token list; checkpoints store it so a model is never
  /// silently loaded against a different vocabulary.
  std::uint64_t fingerprint() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace murke
