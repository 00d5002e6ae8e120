#include "murke/corpus.hpp"

#include <cctype>
#include <fstream>
#include <unordered_set>

#include "json.hpp"

using nlohmann::json;

namespace murke {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    const bool keep = std::isalnum(c) || c >= 0x80;
    if (keep) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

Corpus Corpus::ingest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("ingest: cannot open " + path);

  Corpus corpus;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") ||
        !obj.contains("title") || !obj.contains("text") || !obj["id"].is_string() ||
        !obj["title"].is_string() || !obj["text"].is_string()) {
      throw Error("ingest: malformed corpus line " + std::to_string(line_no) + " in " + path);
    }
    Document doc;
    doc.doc_id = obj["id"].get<std::string>();
    doc.title = obj["title"].get<std::string>();
    doc.raw_text = obj["text"].get<std::string>();
    if (!ids.insert(doc.doc_id).second) {
      throw Error("ingest: duplicate doc_id \"" + doc.doc_id + "\" at line " +
                  std::to_string(line_no));
    }
    // titles take part in retrieval text
    doc.tokens = tokenize(doc.title);
    auto body = tokenize(doc.raw_text);
    doc.tokens.insert(doc.tokens.end(), body.begin(), body.end());
    if (doc.tokens.empty()) {
      throw Error("ingest: document with no tokens at line " + std::to_string(line_no));
    }
    corpus.docs_.push_back(std::move(doc));
  }
  if (corpus.docs_.empty()) throw Error("ingest: no documents in " + path);
  corpus.index();
  return corpus;
}

Corpus Corpus::from_documents(std::vector<Document> docs) {
  Corpus corpus;
  std::unordered_set<std::string> ids;
  for (auto& d : docs) {
    if (d.tokens.empty()) throw Error("from_documents: document " + d.doc_id + " has no tokens");
    if (!ids.insert(d.doc_id).second)
      throw Error("from_documents: duplicate doc_id \"" + d.doc_id + "\"");
  }
  corpus.docs_ = std::move(docs);
  corpus.index();
  return corpus;
}

void Corpus::index() {
  by_id_.clear();
  stats_ = CorpusStats{};
  stats_.doc_count = docs_.size();
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    const Document& d = docs_[i];
    by_id_[d.doc_id] = i;
    stats_.total_terms += d.tokens.size();
    std::unordered_set<std::string_view> seen;
    for (const auto& t : d.tokens) {
      if (seen.insert(t).second) ++stats_.doc_freq[t];
    }
  }
  stats_.avg_doc_len =
      static_cast<double>(stats_.total_terms) / static_cast<double>(stats_.doc_count);
}

const Document& Corpus::document(const std::string& doc_id) const {
  auto it = by_id_.find(doc_id);
  if (it == by_id_.end()) throw Error("document: unknown doc_id \"" + doc_id + "\"");
  return docs_[it->second];
}

bool Corpus::contains(const std::string& doc_id) const { return by_id_.count(doc_id) != 0; }

}  // namespace murke
