#include "murke/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

using nlohmann::json;

namespace murke {

namespace {

json header_for(const std::vector<NamedParam>& params, const json& meta) {
  json plist = json::array();
  for (const auto& p : params) {
    plist.push_back({{"name", p.name}, {"shape", p.tensor->shape}});
  }
  return json{{"format", "murke-ckpt-v1"}, {"meta", meta}, {"params", plist}};
}

// f32 little-endian on disk; this targets little-endian hosts.
void write_f32(std::ofstream& os, const std::vector<double>& v) {
  std::vector<float> buf(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) buf[i] = static_cast<float>(v[i]);
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<NamedParam>& params,
                     const json& meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("save_checkpoint: cannot open " + path);
  os << header_for(params, meta).dump() << "\n";
  for (const auto& p : params) write_f32(os, p.tensor->value);
  if (!os) throw Error("save_checkpoint: write failed for " + path);
}

nlohmann::json read_checkpoint_meta(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("read_checkpoint_meta: cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw Error("read_checkpoint_meta: empty file " + path);
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "murke-ckpt-v1")
    throw Error("read_checkpoint_meta: not a murke checkpoint: " + path);
  return header["meta"];
}

nlohmann::json load_checkpoint(const std::string& path, const std::vector<NamedParam>& params) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("load_checkpoint: cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw Error("load_checkpoint: empty file " + path);
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "murke-ckpt-v1")
    throw Error("load_checkpoint: not a murke checkpoint: " + path);

  const auto& plist = header["params"];
  if (plist.size() != params.size())
    throw Error("load_checkpoint: parameter count mismatch, file has " +
                std::to_string(plist.size()) + ", model has " + std::to_string(params.size()));

  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string name = plist[i]["name"];
    const std::vector<std::size_t> shape = plist[i]["shape"];
    if (name != params[i].name)
      throw Error("load_checkpoint: parameter " + std::to_string(i) + " is \"" + name +
                  "\" in file but \"" + params[i].name + "\" in model");
    if (shape != params[i].tensor->shape)
      throw Error("load_checkpoint: shape mismatch for " + name);
  }
  for (const auto& p : params) {
    std::vector<float> buf(p.tensor->size());
    is.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (is.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
      throw Error("load_checkpoint: truncated value stream in " + path);
    for (std::size_t i = 0; i < buf.size(); ++i) p.tensor->value[i] = buf[i];
  }
  return header["meta"];
}

}  // namespace murke
