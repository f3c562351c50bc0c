#pragma once

#include <cstdint>
#include <random>

namespace porosity {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed of the independent stream `stream` under `master`. Streams are derived
// from a counter, so the same (master, stream) pair always yields the same
// generator regardless of how many other streams were created before it.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

inline Rng make_stream(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

// Well-known stream ids, so unrelated consumers of one master seed never
// share a stream.
enum class StreamDomain : std::uint64_t {
  kTree = 0,
  kImportance = 1ULL << 40,
  kFolds = 2ULL << 40,
  kBayesOpt = 3ULL << 40,
  kSplit = 4ULL << 40,
};

inline std::uint64_t stream_id(StreamDomain domain, std::uint64_t index) {
  return static_cast<std::uint64_t>(domain) + index;
}

}  // namespace porosity
