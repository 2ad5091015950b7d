#include "sbm/random.h"

#include <cmath>

namespace sbm {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(splitmix64_mix(splitmix64_mix(seed + kGolden) ^ (stream_id * 0xD1B54A32D192ED03ULL + kGolden))) {}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return splitmix64_mix(key_ + counter_ * kGolden);
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

std::int64_t sample_poisson(RandomStream& rng, double lambda) {
  if (!(lambda > 0.0)) return 0;
  if (lambda < 10.0) {
    const double u = rng.uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    std::int64_t x = 0;
    while (u > cdf && x < 1000) {
      ++x;
      p *= lambda / static_cast<double>(x);
      cdf += p;
    }
    return x;
  }
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::int64_t>(k);
  }
}

int sample_categorical(RandomStream& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = rng.uniform() * total;
  double cdf = 0.0;
  int last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last_positive = static_cast<int>(k);
    cdf += weights[k];
    if (u < cdf) return static_cast<int>(k);
  }
  return last_positive;
}

std::vector<double> sample_flat_dirichlet(RandomStream& rng, int K) {
  std::vector<double> x(K);
  double total = 0.0;
  for (double& v : x) {
    v = -std::log(rng.uniform_open());
    total += v;
  }
  for (double& v : x) v /= total;
  return x;
}

}  // namespace sbm
