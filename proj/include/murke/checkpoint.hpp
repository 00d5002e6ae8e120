#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "murke/nn.hpp"

namespace murke {

/// Writes parameters as a one-line JSON header (names, shapes, meta)
/// followed by the values as a flat little-endian f32 stream, in header
/// order.
void save_checkpoint(const std::string& path, const std::vector<NamedParam>& params,
                     const nlohmann::json& meta);

/// Reads a checkpoint into pre-built parameters. Names and shapes must
/// match the header exactly. Returns the meta object.
nlohmann::json load_checkpoint(const std::string& path, const std::vector<NamedParam>& params);

/// Header meta only, for model reconstruction before loading.
nlohmann::json read_checkpoint_meta(const std::string& path);

}  // namespace murke
