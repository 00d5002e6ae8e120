#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "murke/corpus.hpp"
#include "murke/dataset.hpp"

namespace murke {

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
};

/// Fixed English stopword list, overridable from a file (one word per line).
class Stoplist {
 public:
  static const Stoplist& builtin();
  static Stoplist from_file(const std::string& path);
  bool contains(const std::string& term) const { return words_.count(term) != 0; }

 private:
  std::set<std::string> words_;
};

/// idf(t) = ln(1 + (N - df + 0.5)/(df + 0.5)); always nonnegative.
double idf(const CorpusStats& stats, const std::string& term);

/// Drops stopwords, ranks the remaining distinct terms by idf descending
/// (ties by first occurrence), returns at most k.
std::vector<std::string> select_key_terms(const std::vector<std::string>& tokens,
                                          const CorpusStats& stats, std::size_t k,
                                          const Stoplist& stop = Stoplist::builtin());

/// One BM25 query per answer option: question key terms followed by that
/// option's key terms.
struct QuerySet {
  std::vector<std::vector<std::string>> queries;
};

QuerySet form_queries(const Question& question, const CorpusStats& stats, std::size_t k,
                      const Stoplist& stop = Stoplist::builtin());

/// Okapi BM25 with the ln(1+...) idf; duplicate query terms count once.
double bm25_score(const std::vector<std::string>& query, const std::string& doc_id,
                  const Corpus& corpus, const Bm25Params& params = {});

struct ScoredDoc {
  std::string doc_id;
  double score;
};

/// Top-K by score descending, ties by doc_id; zero-score documents excluded.
std::vector<ScoredDoc> retrieve_top_k(const std::vector<std::string>& query,
                                      const Corpus& corpus, std::size_t k,
                                      const Bm25Params& params = {});

/// Union of the per-option retrievals: candidate ids sorted ascending plus
/// the best score seen per id.
struct CandidateSet {
  std::vector<std::string> ids;               // sorted
  std::map<std::string, double> max_score;    // id -> best score over queries
};

CandidateSet union_candidates(const QuerySet& qs, const Corpus& corpus, std::size_t k,
                              const Bm25Params& params = {});

}  // namespace murke
