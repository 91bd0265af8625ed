#pragma once

#include <cstdint>
#include <vector>

#include "cconvex/domain.hpp"

namespace cconvex::detail {

inline constexpr std::uint32_t kSampleChunkSize = 16384;
// Chunks generated per scheduling round; fixed so results never depend on the
// number of threads.
inline constexpr std::size_t kSampleWave = 8;
inline constexpr double kMinAcceptance = 1e-4;

struct SampleChunk {
  ComplexMatrix points;  // one accepted point per column
  std::vector<std::uint32_t> proposal_index;  // position of each point in the chunk
  std::uint64_t proposals = kSampleChunkSize;
};

/// Proposals for chunk `index`, drawn from a generator seeded by (seed, index).
SampleChunk propose_chunk(const Domain& domain, const Box& box, std::uint64_t seed,
                          std::uint64_t index);

struct ChunkedSamples {
  std::vector<SampleChunk> chunks;  // truncated so exactly `count` points remain
  Box box;
  std::uint64_t proposals = 0;
  std::size_t accepted = 0;

  double volume() const;
  double volume_stderr() const;
};

ChunkedSamples draw_chunks(const Domain& domain, std::size_t count, std::uint64_t seed,
                           unsigned threads);

}  // namespace cconvex::detail
