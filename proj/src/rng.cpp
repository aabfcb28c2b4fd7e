#include "bqr/rng.hpp"

namespace bqr {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += kGolden;
  return mix(state);
}

RngStream::RngStream(std::uint64_t master_seed, std::vector<std::uint64_t> path)
    : master_(master_seed), path_(std::move(path)) {
  seed_from_path();
}

RngStream RngStream::split(std::initializer_list<std::uint64_t> tags) const {
  std::vector<std::uint64_t> p = path_;
  p.insert(p.end(), tags.begin(), tags.end());
  return RngStream(master_, std::move(p));
}

RngStream RngStream::split(StreamPurpose purpose,
                           std::initializer_list<std::uint64_t> tags) const {
  std::vector<std::uint64_t> p = path_;
  p.push_back(static_cast<std::uint64_t>(purpose));
  p.insert(p.end(), tags.begin(), tags.end());
  return RngStream(master_, std::move(p));
}

void RngStream::seed_from_path() {
  // Chain the path through the finalizer; position is folded in so that
  // (1, 2) and (2, 1) land on different seeds.
  std::uint64_t h = mix(master_ ^ kGolden);
  std::uint64_t depth = 0;
  for (std::uint64_t tag : path_) {
    ++depth;
    h = mix(h ^ mix(tag + depth * kGolden));
  }
  h ^= mix(depth);
  for (auto& word : s_) word = splitmix64(h);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() noexcept {
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace bqr
