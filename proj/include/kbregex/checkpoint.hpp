#pragma once

#include <filesystem>

#include "kbregex/kb.hpp"
#include "kbregex/model.hpp"

namespace kbregex {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Binary layout (little-endian):
//   magic "KBRXCKPT", u32 version, u8 kind, u32 dim, f64 alpha, f64 gamma,
//   u64 num_entities, u64 num_relations, u64 entity_vocab_hash,
//   u64 relation_vocab_hash, u32 group_count, then per group:
//   u32 name_len, name bytes, u32 rows, u32 cols, rows*cols f64 values.
// The JSON sidecar (<path>.json) stores hyperparameters and both vocabularies.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const KnowledgeBase& kb);

// Vocabulary hashes must match the provided KB.
ModelParams load_checkpoint(const std::filesystem::path& path, const KnowledgeBase& kb);

}  // namespace kbregex
