#pragma once

#include <cstdint>
#include <utility>

namespace bethe {

// Counter-based generator (Philox 4x32-10). Every draw is a pure function of
// (seed, stream, index), so independent consumers can pull from pre-assigned
// streams in any order, on any number of threads, and reproduce the same
// values bit for bit. The 64-bit stream id is split across the two upper
// counter words; round keys follow the reference constants.
namespace philox {

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

struct Block {
  std::uint32_t x0, x1, x2, x3;
};

inline Block block(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint32_t c0 = static_cast<std::uint32_t>(index);
  std::uint32_t c1 = static_cast<std::uint32_t>(index >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(stream);
  std::uint32_t c3 = static_cast<std::uint32_t>(stream >> 32);
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    const std::uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

// Strictly inside (0,1): the offset keeps log() and tan() safe at the ends.
// The all-ones block would round up to 1.0 exactly (2^53 - 0.5 is halfway and
// resolves to the even neighbor), so that single case pins to the largest
// double below one.
inline double to_unit(std::uint64_t bits) {
  const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
  return u < 1.0 ? u : 0x1.fffffffffffffp-1;
}

}  // namespace philox

// One logical random stream, keyed by (seed, stream). Draw `index` always
// yields the same pair of uniforms regardless of evaluation order.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Two independent uniforms in (0,1) from counter block `index`.
  std::pair<double, double> uniform_pair_at(std::uint64_t index) const {
    const philox::Block b = philox::block(seed_, stream_, index);
    const std::uint64_t lo = (static_cast<std::uint64_t>(b.x1) << 32) | b.x0;
    const std::uint64_t hi = (static_cast<std::uint64_t>(b.x3) << 32) | b.x2;
    return {philox::to_unit(lo), philox::to_unit(hi)};
  }

  double uniform_at(std::uint64_t index) const { return uniform_pair_at(index).first; }

  // Sequential convenience; consumes one counter block per call.
  double next_uniform() { return uniform_at(cursor_++); }
  std::pair<double, double> next_uniform_pair() { return uniform_pair_at(cursor_++); }
  std::uint64_t cursor() const { return cursor_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t cursor_ = 0;
};

// Composes a stream id from a coarse group (grid cell, experiment) and a
// member within the group (sample index). Keeps unrelated consumers apart.
inline std::uint64_t substream(std::uint64_t group, std::uint64_t member) {
  return (group << 32) | (member & 0xFFFFFFFFu);
}

// Derives an independent seed for a nested experiment (grid cell, probe).
// Pure function of its inputs, so derived work units stay reproducible.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
  const philox::Block b = philox::block(seed, salt, index);
  return (static_cast<std::uint64_t>(b.x1) << 32) | b.x0;
}

// Registry of group ids; each consumer owns one so no two experiments ever
// share a (seed, stream, index) triple.
namespace stream_group {
inline constexpr std::uint64_t kEdgeProbability = 1;
inline constexpr std::uint64_t kLyapunovSamples = 2;
inline constexpr std::uint64_t kPopulationPotential = 3;
inline constexpr std::uint64_t kPopulationPick = 4;
inline constexpr std::uint64_t kPhaseScan = 5;
inline constexpr std::uint64_t kVerifySamples = 6;
inline constexpr std::uint64_t kScatterSamples = 7;
inline constexpr std::uint64_t kMomentSamples = 8;
inline constexpr std::uint64_t kDensitySamples = 9;
}  // namespace stream_group

}  // namespace bethe
