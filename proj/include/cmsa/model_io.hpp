#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "cmsa/rcnn.hpp"

namespace cmsa {

struct ModelFile {
  RcnnConfig config;
  RcnnParams params;
  std::uint64_t vocab_fingerprint = 0;
  std::uint64_t seed = 0;
};

// Text container:
//
//   #rcnn-model v1
//   <key> <value>            one line per config field, vocab_size,
//   ...                      vocab_hash and seed
//   tensors <count>
//   <name> <rows> <cols>     then `rows` lines of `cols` values (%.17g)
//
// Saving a loaded model reproduces the file byte for byte.
void save_model(std::ostream& out, const ModelFile& model);
ModelFile load_model(std::istream& in);

// File-level helpers. The write goes through a temporary file that replaces
// `path` only on success. Loading rejects a model whose vocabulary
// fingerprint differs from `expected_vocab`.
void save_checkpoint(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_checkpoint(const std::filesystem::path& path,
                          std::optional<std::uint64_t> expected_vocab = std::nullopt);

}  // namespace cmsa
