#include "murke/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "murke/retrieval.hpp"

using nlohmann::json;

namespace murke {

namespace {

constexpr const char* kRelations[] = {"modulates", "triggers", "governs", "amplifies"};
constexpr const char* kJunk[] = {"folklore", "gossip", "trivia",  "anecdote",
                                 "rumor",    "hearsay", "pastime", "chatter"};
constexpr const char* kCategories[] = {"BIR", "MIR", "EIR", "FIR", "PIR", "QIR"};

constexpr const char* kConsonants = "bdfgklmnprstvz";
constexpr const char* kVowels = "aeiou";

// bijective index -> pronounceable word; uniqueness is by construction
std::string unique_word(std::size_t index) {
  const std::size_t nc = 14, nv = 5, syl = nc * nv;
  std::string w;
  for (int s = 0; s < 3; ++s) {
    const std::size_t k = index % syl;
    index /= syl;
    w.push_back(kConsonants[k % nc]);
    w.push_back(kVowels[k / nc]);
  }
  return w;
}

std::string qid_of(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "q%04zu", i);
  return buf;
}

Document make_doc(std::string id, const std::string& head, std::string text) {
  Document d;
  d.doc_id = std::move(id);
  d.title = head + " notes";
  d.raw_text = std::move(text);
  d.tokens = tokenize(d.title);
  auto body = tokenize(d.raw_text);
  d.tokens.insert(d.tokens.end(), body.begin(), body.end());
  return d;
}

void write_jsonl_corpus(const std::vector<Document>& docs, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_synthetic: cannot open " + path);
  for (const auto& d : docs) {
    os << json{{"id", d.doc_id}, {"title", d.title}, {"text", d.raw_text}}.dump() << "\n";
  }
}

void write_jsonl_questions(const std::vector<Question>& qs, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_synthetic: cannot open " + path);
  for (const auto& q : qs) {
    json obj = {{"qid", q.qid},
                {"category", q.category},
                {"question", q.text},
                {"options", q.option_texts}};
    if (q.answer_idx) obj["answer_idx"] = *q.answer_idx;
    os << obj.dump() << "\n";
  }
}

}  // namespace

SynthData generate_synthetic(const SynthConfig& cfg) {
  if (cfg.hops != 2 && cfg.hops != 3) throw Error("generate_synthetic: hops must be 2 or 3");
  if (cfg.options < 2) throw Error("generate_synthetic: need at least 2 options");
  if (cfg.n_questions == 0) throw Error("generate_synthetic: need at least 1 question");

  // unique words per question: subject, bridges, gold, wrong options,
  // 3 question fillers, and one filler per non-hop1 document
  const std::size_t bridges = static_cast<std::size_t>(cfg.hops) - 1;
  const std::size_t per_q = 1 + bridges + 1 + (cfg.options - 1) + 3 +
                            (bridges + cfg.distractors + (cfg.options - 1));
  const std::size_t needed = per_q * cfg.n_questions;
  const std::size_t pool = std::min<std::size_t>(cfg.vocab_size, 14 * 5 * 14 * 5 * 14 * 5);
  if (needed > pool) {
    throw Error("generate_synthetic: vocab too small to guarantee uniqueness (need " +
                std::to_string(needed) + " words, have " + std::to_string(pool) + ")");
  }

  Rng rng(cfg.seed);
  SynthData data;
  std::size_t next_word = 0;
  auto fresh = [&] { return unique_word(next_word++); };
  auto rel = [&] { return std::string(kRelations[rng.index(std::size(kRelations))]); };
  auto junk = [&] { return std::string(kJunk[rng.index(std::size(kJunk))]); };

  for (std::size_t qi = 0; qi < cfg.n_questions; ++qi) {
    const std::string qid = qid_of(qi);
    const std::string subject = fresh();
    std::vector<std::string> bridge;
    for (std::size_t b = 0; b < bridges; ++b) bridge.push_back(fresh());
    const std::string gold = fresh();
    std::vector<std::string> wrong;
    for (std::size_t w = 0; w + 1 < cfg.options; ++w) wrong.push_back(fresh());
    const std::string qf1 = fresh(), qf2 = fresh(), qf3 = fresh();

    Question q;
    q.qid = qid;
    q.category = kCategories[qi % std::size(kCategories)];
    q.text = "which " + qf1 + " " + qf2 + " does the " + subject + " " + qf3 + " involve";
    q.tokens = tokenize(q.text);

    // options: gold at a seeded position
    std::vector<std::string> opt_words = wrong;
    const std::size_t gold_pos = rng.index(cfg.options);
    opt_words.insert(opt_words.begin() + gold_pos, gold);
    for (const auto& w : opt_words) {
      q.option_texts.push_back("the " + w);
      q.option_tokens.push_back(tokenize(q.option_texts.back()));
    }
    q.answer_idx = static_cast<int>(gold_pos);

    // chain: subject -> bridge(s) -> gold answer
    std::vector<std::string> chain_ids;
    {
      const std::string id = qid + "_hop1";
      data.docs.push_back(make_doc(id, subject,
                                   "the " + subject + " " + qf1 + " " + qf2 + " " + qf3 + " " +
                                       rel() + " the " + bridge[0]));
      chain_ids.push_back(id);
    }
    for (std::size_t b = 1; b < bridges; ++b) {
      const std::string id = qid + "_hop" + std::to_string(b + 1);
      data.docs.push_back(make_doc(id, bridge[b - 1],
                                   "the " + bridge[b - 1] + " " + rel() + " the " + bridge[b] +
                                       " " + fresh()));
      chain_ids.push_back(id);
    }
    {
      const std::string id = qid + "_hop" + std::to_string(cfg.hops);
      data.docs.push_back(make_doc(id, bridge.back(),
                                   "the " + bridge.back() + " " + rel() + " the " + gold + " " +
                                       fresh()));
      chain_ids.push_back(id);
    }

    // distractors share question surface terms but never the bridge
    const std::string qfs[3] = {qf1, qf2, qf3};
    for (std::size_t dj = 0; dj < cfg.distractors; ++dj) {
      const std::string id = qid + "_dis" + std::to_string(dj + 1);
      data.docs.push_back(make_doc(id, subject,
                                   "the " + subject + " " + qfs[dj % 3] + " " +
                                       qfs[(dj + 1) % 3] + " " + junk() + " " + junk() + " " +
                                       fresh()));
    }

    // every wrong option is mentioned somewhere, with no support
    for (std::size_t w = 0; w < wrong.size(); ++w) {
      const std::string id = qid + "_opt" + std::to_string(w + 1);
      data.docs.push_back(make_doc(id, wrong[w],
                                   "the " + wrong[w] + " " + junk() + " " + junk() + " " +
                                       fresh()));
    }

    data.chains[qid] = std::move(chain_ids);
    data.questions.push_back(std::move(q));
  }
  return data;
}

void write_synthetic(const SynthData& data, const std::string& out_dir, std::size_t n_dev) {
  std::filesystem::create_directories(out_dir);
  write_jsonl_corpus(data.docs, out_dir + "/corpus.jsonl");
  write_jsonl_questions(data.questions, out_dir + "/dataset.jsonl");
  {
    std::ofstream os(out_dir + "/chains.jsonl", std::ios::binary);
    if (!os) throw Error("write_synthetic: cannot open " + out_dir + "/chains.jsonl");
    for (const auto& q : data.questions) {
      os << json{{"qid", q.qid}, {"chain", data.chains.at(q.qid)}}.dump() << "\n";
    }
  }
  if (n_dev > 0) {
    if (n_dev >= data.questions.size())
      throw Error("write_synthetic: n_dev must leave at least one training question");
    const std::size_t n_train = data.questions.size() - n_dev;
    std::vector<Question> tr(data.questions.begin(), data.questions.begin() + n_train);
    std::vector<Question> dv(data.questions.begin() + n_train, data.questions.end());
    write_jsonl_questions(tr, out_dir + "/train.jsonl");
    write_jsonl_questions(dv, out_dir + "/dev.jsonl");
  }
}

std::map<std::string, std::vector<std::string>> load_chains(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("load_chains: cannot open " + path);
  std::map<std::string, std::vector<std::string>> chains;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.contains("qid") || !obj.contains("chain"))
      throw Error("load_chains: malformed line " + std::to_string(line_no) + " in " + path);
    chains[obj["qid"].get<std::string>()] = obj["chain"].get<std::vector<std::string>>();
  }
  return chains;
}

std::vector<std::string> single_doc_answerable(const SynthData& data, std::size_t key_terms) {
  Corpus corpus = Corpus::from_documents(data.docs);
  std::vector<std::string> offenders;
  for (const auto& q : data.questions) {
    const auto terms = select_key_terms(q.tokens, corpus.stats(), key_terms);
    const auto& answer_tokens = q.option_tokens[static_cast<std::size_t>(*q.answer_idx)];
    std::vector<std::string> answer_content;
    for (const auto& t : answer_tokens) {
      if (!Stoplist::builtin().contains(t)) answer_content.push_back(t);
    }
    for (const auto& doc : data.docs) {
      std::set<std::string> toks(doc.tokens.begin(), doc.tokens.end());
      bool all_terms = true;
      for (const auto& t : terms) all_terms = all_terms && toks.count(t);
      bool has_answer = !answer_content.empty();
      for (const auto& t : answer_content) has_answer = has_answer && toks.count(t);
      if (all_terms && has_answer) {
        offenders.push_back(q.qid);
        break;
      }
    }
  }
  return offenders;
}

double chain_recovery_rate(const std::map<std::string, std::vector<std::string>>& traces,
                           const std::map<std::string, std::vector<std::string>>& chains) {
  if (traces.empty()) throw Error("chain_recovery_rate: no traces");
  std::size_t hit = 0;
  for (const auto& [qid, selected] : traces) {
    auto it = chains.find(qid);
    if (it == chains.end()) throw Error("chain_recovery_rate: unknown qid \"" + qid + "\"");
    if (selected == it->second) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(traces.size());
}

}  // namespace murke
