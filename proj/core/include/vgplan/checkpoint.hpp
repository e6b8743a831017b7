#pragma once

#include <cstdint>
#include <filesystem>

#include "vgplan/transformer.hpp"
#include "vgplan/vocabulary.hpp"

namespace vgplan {

// Binary layout (little-endian):
//   "VGPLCKPT" | u32 version | u32 head | i32 layers, heads, width, context,
//   vocab_size | u32 token count, then (u32 length, bytes) per token |
//   u64 parameter count | f32 parameters | u32 CRC-32 of everything before.
constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Transformer<float> model;
  Vocabulary vocab;
};

// Throws IoError.
void save_checkpoint(const std::filesystem::path& path, const Transformer<float>& model,
                     const Vocabulary& vocab);

// Throws IoError, ChecksumError (truncated or corrupted file) and
// VersionMismatch (foreign format version, or a vocabulary differing from
// `expected` when given).
Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary* expected = nullptr);

}  // namespace vgplan
