#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "murke/common.hpp"

namespace murke {

/// Lowercases and splits on whitespace/punctuation boundaries; tokens are
/// maximal alphanumeric runs (bytes >= 0x80 are kept, so UTF-8 survives).
/// Punctuation-only input yields nothing.
std::vector<std::string> tokenize(std::string_view text);

struct Document {
  std::string doc_id;
  std::string title;
  std::vector<std::string> tokens;  // title tokens then body tokens
  std::string raw_text;
};

struct CorpusStats {
  std::size_t doc_count = 0;
  double avg_doc_len = 0.0;
  std::unordered_map<std::string, std::size_t> doc_freq;
  std::size_t total_terms = 0;
};

/// Read-only document collection built from a JSONL file
/// ({"id","title","text"} per line). Safe to share across threads after
/// ingestion.
class Corpus {
 public:
  static Corpus ingest(const std::string& path);
  static Corpus from_documents(std::vector<Document> docs);

  const Document& document(const std::string& doc_id) const;  // not-found -> Error
  bool contains(const std::string& doc_id) const;
  const std::vector<Document>& documents() const { return docs_; }
  const CorpusStats& stats() const { return stats_; }

 private:
  void index();
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> by_id_;
  CorpusStats stats_;
};

}  // namespace murke
