#include "murke/dataset.hpp"

#include <fstream>

#include "json.hpp"

using nlohmann::json;

namespace murke {

std::vector<Question> load_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("load_dataset: cannot open " + path);
  std::vector<Question> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj = json::parse(line, nullptr, false);
    const std::string where = " at line " + std::to_string(line_no) + " in " + path;
    if (obj.is_discarded() || !obj.is_object())
      throw Error("load_dataset: malformed JSON" + where);
    if (!obj.contains("qid") || !obj.contains("question") || !obj.contains("options"))
      throw Error("load_dataset: missing qid/question/options" + where);

    Question q;
    q.qid = obj["qid"].get<std::string>();
    q.category = obj.value("category", std::string("NA"));
    q.text = obj["question"].get<std::string>();
    q.tokens = tokenize(q.text);
    if (!obj["options"].is_array() || obj["options"].size() < 2)
      throw Error("load_dataset: need at least 2 options" + where);
    for (const auto& o : obj["options"]) {
      q.option_texts.push_back(o.get<std::string>());
      q.option_tokens.push_back(tokenize(q.option_texts.back()));
    }
    if (obj.contains("answer_idx") && !obj["answer_idx"].is_null()) {
      const int idx = obj["answer_idx"].get<int>();
      if (idx < 0 || static_cast<std::size_t>(idx) >= q.option_texts.size())
        throw Error("load_dataset: answer_idx out of range" + where);
      q.answer_idx = idx;
    }
    if (obj.contains("image_vec") && !obj["image_vec"].is_null()) {
      q.image_vec = obj["image_vec"].get<std::vector<double>>();
    }
    out.push_back(std::move(q));
  }
  if (out.empty()) throw Error("load_dataset: no questions in " + path);
  return out;
}

const Question& find_question(const std::vector<Question>& qs, const std::string& qid) {
  for (const auto& q : qs) {
    if (q.qid == qid) return q;
  }
  throw Error("find_question: unknown qid \"" + qid + "\"");
}

}  // namespace murke
