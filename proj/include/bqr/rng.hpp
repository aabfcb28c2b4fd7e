#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace bqr {

// Purpose tags used as path components when splitting streams.
enum class StreamPurpose : std::uint64_t {
  kChain = 1,
  kData = 2,
  kPrior = 3,
  kInit = 4,
  kOracle = 5,
};

// Reproducible random stream addressed by (master seed, path). The path is
// hashed with SplitMix64 into the seed of a xoshiro256** generator, so two
// streams with different paths share no state and the same path always
// replays the same sequence on any platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::vector<std::uint64_t> path = {});

  // New stream whose path is this path extended by `tags`.
  RngStream split(std::initializer_list<std::uint64_t> tags) const;
  RngStream split(StreamPurpose purpose, std::initializer_list<std::uint64_t> tags = {}) const;

  std::uint64_t master_seed() const noexcept { return master_; }
  const std::vector<std::uint64_t>& path() const noexcept { return path_; }

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform on the open interval (0, 1).
  double uniform_open() noexcept;

 private:
  void seed_from_path();

  std::uint64_t master_;
  std::vector<std::uint64_t> path_;
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

}  // namespace bqr
