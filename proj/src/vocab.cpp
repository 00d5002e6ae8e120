#include "murke/vocab.hpp"

#include <algorithm>
#include <set>

namespace murke {

Vocab Vocab::build(const Corpus& corpus, const std::vector<const std::vector<Question>*>& sets) {
  std::set<std::string> uniq;
  for (const auto& doc : corpus.documents()) uniq.insert(doc.tokens.begin(), doc.tokens.end());
  for (const auto* qs : sets) {
    for (const auto& q : *qs) {
      uniq.insert(q.tokens.begin(), q.tokens.end());
      for (const auto& opt : q.option_tokens) uniq.insert(opt.begin(), opt.end());
    }
  }
  Vocab v;
  v.tokens_.assign(uniq.begin(), uniq.end());
  for (std::size_t i = 0; i < v.tokens_.size(); ++i)
    v.index_[v.tokens_[i]] = static_cast<int>(i) + kReserved;
  return v;
}

int Vocab::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocab::ids(const std::vector<std::string>& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::uint64_t Vocab::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (const auto& t : tokens_) {
    for (unsigned char c : t) mix(c);
    mix('\n');
  }
  return h;
}

}  // namespace murke
