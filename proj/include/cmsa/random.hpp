#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cmsa {

// Every random stream in the toolkit is derived from one user seed and a
// stream name ("init", "shuffle", "dropout", ...), so that streams can be
// varied independently while the whole run stays reproducible.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

inline std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream) {
  return std::mt19937_64(derive_seed(seed, stream));
}

// 64-bit FNV-1a, used for content fingerprints.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace cmsa
