#pragma once

#include <cstdint>

namespace driftgate {

// splitmix64 finalizer: bijective on 64-bit words, good avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ (mix64(value) + 0x9e3779b97f4a7c15ULL + (seed << 6) +
                       (seed >> 2)));
}

// Sequential generator (splitmix64). Cheap, seedable, and exactly
// reproducible across platforms, which is all the simulator needs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform in [0, 1), 53-bit resolution.
  double next_u01();
  // Uniform in (0, 1); safe to pass through log().
  double next_open01();
  std::uint32_t next_below(std::uint32_t n);

  int poisson(double lambda);
  double normal(double mean = 0.0, double stddev = 1.0);
  double exponential(double mean);
  double log_normal(double mean, double sigma_log);

 private:
  std::uint64_t state_;
};

// Counter-based draws: a pure function of (seed, a, b, c). Folds and stream
// positions index into the same logical random sequence no matter how work
// is scheduled across threads.
constexpr std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b, std::uint64_t c = 0) {
  return mix64(hash_combine(hash_combine(hash_combine(seed, a), b), c));
}

double counter_u01(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                   std::uint64_t c = 0);
std::uint32_t counter_below(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b, std::uint32_t n);
int counter_poisson(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                    double lambda);

}  // namespace driftgate
