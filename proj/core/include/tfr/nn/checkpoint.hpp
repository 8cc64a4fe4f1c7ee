#pragma once

#include <filesystem>

#include "tfr/nn/model.hpp"

namespace tfr::nn {

// Binary checkpoint: "NNCK", u64 config digest, u32 parameter count, then
// per parameter: u32 name length, name bytes, u32 rank, u32 dims, float32
// data. Little-endian throughout.
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config,
                     const Parameters& params);

// Throws tfr::Error on bad magic, truncation, or a config digest mismatch.
Parameters load_checkpoint(const std::filesystem::path& path, const ModelConfig& config);

}  // namespace tfr::nn
