#include "driftgate/rng.hpp"

#include <cmath>

#include "driftgate/error.hpp"

namespace driftgate {

namespace {

constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

double u01_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * kInv53;
}

// Lemire-style unbiased-enough bounded draw; fine for simulation use.
std::uint32_t below_from_bits(std::uint64_t bits, std::uint32_t n) {
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(bits) * n) >> 64);
}

}  // namespace

std::uint64_t SplitMix64::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_u01() { return u01_from_bits(next()); }

double SplitMix64::next_open01() {
  return (static_cast<double>(next() >> 11) + 0.5) * kInv53;
}

std::uint32_t SplitMix64::next_below(std::uint32_t n) {
  if (n == 0) raise(ErrorKind::domain_error, "next_below(0)");
  return below_from_bits(next(), n);
}

int SplitMix64::poisson(double lambda) {
  if (lambda < 0.0 || !std::isfinite(lambda))
    raise(ErrorKind::domain_error, "poisson rate must be finite and >= 0");
  if (lambda == 0.0) return 0;
  // Knuth's product method. For large rates, peel off chunks of 30 so the
  // running product never underflows.
  int total = 0;
  while (lambda > 30.0) {
    double part = std::exp(-30.0);
    double prod = next_open01();
    int k = 0;
    while (prod > part) {
      ++k;
      prod *= next_open01();
    }
    total += k;
    lambda -= 30.0;
  }
  const double limit = std::exp(-lambda);
  double prod = next_open01();
  int k = 0;
  while (prod > limit) {
    ++k;
    prod *= next_open01();
  }
  return total + k;
}

double SplitMix64::normal(double mean, double stddev) {
  // Box-Muller; two fresh uniforms per deviate keeps draws a pure function
  // of generator position.
  const double u1 = next_open01();
  const double u2 = next_u01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
}

double SplitMix64::exponential(double mean) {
  if (!(mean > 0.0)) raise(ErrorKind::domain_error, "exponential mean must be > 0");
  return -mean * std::log(next_open01());
}

double SplitMix64::log_normal(double mean, double sigma_log) {
  if (!(mean > 0.0)) raise(ErrorKind::domain_error, "log-normal mean must be > 0");
  // Parameterized by the distribution mean: mu = ln(mean) - sigma^2/2.
  const double mu = std::log(mean) - 0.5 * sigma_log * sigma_log;
  return std::exp(normal(mu, sigma_log));
}

double counter_u01(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                   std::uint64_t c) {
  return u01_from_bits(counter_u64(seed, a, b, c));
}

std::uint32_t counter_below(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b, std::uint32_t n) {
  if (n == 0) raise(ErrorKind::domain_error, "counter_below(0)");
  return below_from_bits(counter_u64(seed, a, b), n);
}

int counter_poisson(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                    double lambda) {
  SplitMix64 g(counter_u64(seed, a, b));
  return g.poisson(lambda);
}

}  // namespace driftgate
