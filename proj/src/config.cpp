#include "murke/config.hpp"

#include <fstream>

namespace murke {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw Error("config: bad boolean for " + key + ": \"" + v + "\"");
}

template <typename T>
T parse_num(const std::string& key, const std::string& v) {
  try {
    if constexpr (std::is_same_v<T, double>) return std::stod(v);
    else if constexpr (std::is_same_v<T, int>) return std::stoi(v);
    else if constexpr (std::is_same_v<T, unsigned>) return static_cast<unsigned>(std::stoul(v));
    else if constexpr (std::is_same_v<T, std::uint64_t>) return std::stoull(v);
    else return static_cast<T>(std::stoull(v));
  } catch (const std::exception&) {
    throw Error("config: bad number for " + key + ": \"" + v + "\"");
  }
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "T") T = parse_num<int>(key, value);
  else if (key == "lr") lr = parse_num<double>(key, value);
  else if (key == "decay") decay = parse_num<double>(key, value);
  else if (key == "epochs") epochs = parse_num<int>(key, value);
  else if (key == "stage1_epochs") stage1_epochs = parse_num<int>(key, value);
  else if (key == "th_r") th_r = parse_num<double>(key, value);
  else if (key == "topK") topK = parse_num<std::size_t>(key, value);
  else if (key == "key_terms") key_terms = parse_num<std::size_t>(key, value);
  else if (key == "n_min") n_min = parse_num<std::size_t>(key, value);
  else if (key == "fusion") fusion = value;
  else if (key == "seed") seed = parse_num<std::uint64_t>(key, value);
  else if (key == "exclusion") exclusion = parse_bool(key, value);
  else if (key == "parallel_step") parallel_step = parse_bool(key, value);
  else if (key == "embed_dim") embed_dim = parse_num<std::size_t>(key, value);
  else if (key == "hidden_dim") hidden_dim = parse_num<std::size_t>(key, value);
  else if (key == "image_dim") image_dim = parse_num<std::size_t>(key, value);
  else if (key == "share_encoders") share_encoders = parse_bool(key, value);
  else if (key == "rerank_embed_dim") rerank_embed_dim = parse_num<std::size_t>(key, value);
  else if (key == "rerank_hidden_dim") rerank_hidden_dim = parse_num<std::size_t>(key, value);
  else if (key == "rerank_epochs") rerank_epochs = parse_num<int>(key, value);
  else if (key == "rerank_lr") rerank_lr = parse_num<double>(key, value);
  else if (key == "rerank_mode") rerank_mode = value;
  else if (key == "top_n") top_n = parse_num<std::size_t>(key, value);
  else if (key == "threads") threads = parse_num<unsigned>(key, value);
  else if (key == "embed_file") embed_file = value;
  else if (key == "stoplist_file") stoplist_file = value;
  else if (key == "corpus") corpus = value;
  else if (key == "dataset") dataset = value;
  else if (key == "train") train = value;
  else if (key == "dev") dev = value;
  else if (key == "chains") chains = value;
  else if (key == "checkpoint") checkpoint = value;
  else if (key == "out_dir") out_dir = value;
  else throw Error("config: unknown key \"" + key + "\"");
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("config: cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config: missing '=' at line " + std::to_string(line_no) + " in " + path);
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

}  // namespace murke
