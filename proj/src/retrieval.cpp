#include "murke/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace murke {

namespace {

const char* kBuiltinStopwords[] = {
    "a",     "about", "above", "after",  "again",  "all",   "am",    "an",     "and",   "any",
    "are",   "as",    "at",    "be",     "because","been",  "before","being",  "below", "between",
    "both",  "but",   "by",    "can",    "could",  "did",   "do",    "does",   "doing", "down",
    "during","each",  "few",   "for",    "from",   "further","had",  "has",    "have",  "having",
    "he",    "her",   "here",  "hers",   "him",    "his",   "how",   "i",      "if",    "in",
    "into",  "is",    "it",    "its",    "itself", "just",  "me",    "more",   "most",  "my",
    "no",    "nor",   "not",   "now",    "of",     "off",   "on",    "once",   "only",  "or",
    "other", "our",   "ours",  "out",    "over",   "own",   "same",  "she",    "should","so",
    "some",  "such",  "than",  "that",   "the",    "their", "theirs","them",   "then",  "there",
    "these", "they",  "this",  "those",  "through","to",    "too",   "under",  "until", "up",
    "very",  "was",   "we",    "were",   "what",   "when",  "where", "which",  "while", "who",
    "whom",  "why",   "will",  "with",   "would",  "you",   "your",  "yours",
};

}  // namespace

const Stoplist& Stoplist::builtin() {
  static const Stoplist instance = [] {
    Stoplist s;
    for (const char* w : kBuiltinStopwords) s.words_.insert(w);
    return s;
  }();
  return instance;
}

Stoplist Stoplist::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("Stoplist::from_file: cannot open " + path);
  Stoplist s;
  std::string line;
  while (std::getline(is, line)) {
    auto toks = tokenize(line);
    for (auto& t : toks) s.words_.insert(std::move(t));
  }
  return s;
}

double idf(const CorpusStats& stats, const std::string& term) {
  auto it = stats.doc_freq.find(term);
  const double df = it == stats.doc_freq.end() ? 0.0 : static_cast<double>(it->second);
  const double n = static_cast<double>(stats.doc_count);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

std::vector<std::string> select_key_terms(const std::vector<std::string>& tokens,
                                          const CorpusStats& stats, std::size_t k,
                                          const Stoplist& stop) {
  if (k == 0) throw Error("select_key_terms: k must be >= 1");
  std::vector<std::string> distinct;
  std::unordered_set<std::string> seen;
  for (const auto& t : tokens) {
    if (stop.contains(t)) continue;
    if (seen.insert(t).second) distinct.push_back(t);
  }
  // first-occurrence order is the tiebreak, so the sort must be stable
  std::stable_sort(distinct.begin(), distinct.end(),
                   [&](const std::string& a, const std::string& b) {
                     return idf(stats, a) > idf(stats, b);
                   });
  if (distinct.size() > k) distinct.resize(k);
  return distinct;
}

QuerySet form_queries(const Question& question, const CorpusStats& stats, std::size_t k,
                      const Stoplist& stop) {
  if (question.num_options() < 2) throw Error("form_queries: question needs >= 2 options");
  auto q_terms = select_key_terms(question.tokens, stats, k, stop);
  QuerySet qs;
  for (const auto& opt : question.option_tokens) {
    auto query = q_terms;
    auto opt_terms = select_key_terms(opt, stats, k, stop);
    query.insert(query.end(), opt_terms.begin(), opt_terms.end());
    qs.queries.push_back(std::move(query));
  }
  return qs;
}

double bm25_score(const std::vector<std::string>& query, const std::string& doc_id,
                  const Corpus& corpus, const Bm25Params& params) {
  const Document& doc = corpus.document(doc_id);
  const CorpusStats& stats = corpus.stats();

  std::unordered_map<std::string_view, std::size_t> tf;
  for (const auto& t : doc.tokens) ++tf[t];
  const double len_norm =
      params.k1 * (1.0 - params.b + params.b * static_cast<double>(doc.tokens.size()) /
                                         stats.avg_doc_len);

  std::unordered_set<std::string_view> counted;
  double score = 0.0;
  for (const auto& term : query) {
    if (!counted.insert(term).second) continue;  // duplicates count once
    auto it = tf.find(term);
    if (it == tf.end()) continue;
    const double f = static_cast<double>(it->second);
    score += idf(stats, term) * f * (params.k1 + 1.0) / (f + len_norm);
  }
  return score;
}

std::vector<ScoredDoc> retrieve_top_k(const std::vector<std::string>& query,
                                      const Corpus& corpus, std::size_t k,
                                      const Bm25Params& params) {
  if (k == 0) throw Error("retrieve_top_k: k must be >= 1");
  std::vector<ScoredDoc> scored;
  for (const auto& doc : corpus.documents()) {
    const double s = bm25_score(query, doc.doc_id, corpus, params);
    if (s > 0.0) scored.push_back({doc.doc_id, s});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

CandidateSet union_candidates(const QuerySet& qs, const Corpus& corpus, std::size_t k,
                              const Bm25Params& params) {
  CandidateSet out;
  for (const auto& query : qs.queries) {
    for (const auto& sd : retrieve_top_k(query, corpus, k, params)) {
      auto [it, inserted] = out.max_score.try_emplace(sd.doc_id, sd.score);
      if (!inserted) it->second = std::max(it->second, sd.score);
    }
  }
  out.ids.reserve(out.max_score.size());
  for (const auto& [id, score] : out.max_score) out.ids.push_back(id);
  return out;
}

}  // namespace murke
