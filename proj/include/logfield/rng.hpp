#pragma once

#include <cstdint>
#include <random>

namespace logfield {

// SplitMix64 step, used to expand seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seedable, splittable random stream. Stream k derived from a master seed is
/// reproducible and independent of every other stream index, so Monte Carlo
/// replicas can run concurrently with replica i using substream(i).
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream = 0)
      : master_(master_seed), stream_(stream) {
    std::uint64_t state = master_seed ^ (0x6a09e667f3bcc909ULL * (stream + 1));
    const std::uint64_t a = splitmix64(state);
    const std::uint64_t b = splitmix64(state);
    const std::uint64_t c = splitmix64(state);
    const std::uint64_t d = splitmix64(state);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                      static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
    engine_.seed(seq);
  }

  /// Child stream; distinct (stream, index) pairs map to distinct streams.
  RngStream substream(std::uint64_t index) const {
    std::uint64_t state = stream_;
    const std::uint64_t mixed = splitmix64(state) ^ (index + 1);
    return RngStream(master_, mixed);
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }  // [0, 1)
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t master_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace logfield
