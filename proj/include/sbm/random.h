#pragma once

#include <cstdint>
#include <vector>

namespace sbm {

// Counter-based SplitMix64 stream. The t-th output is a fixed function of
// (seed, stream id, t), so streams can be handed to independent workers or
// node pairs without their drawing order affecting any other stream.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  // Uniform on [0,1) with 53 random bits.
  double uniform();
  // Uniform on (0,1).
  double uniform_open();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

// Inversion for lambda < 10, Hormann's transformed rejection (PTRS) above.
std::int64_t sample_poisson(RandomStream& rng, double lambda);

// Index k with probability weights[k] / sum(weights).
int sample_categorical(RandomStream& rng, const std::vector<double>& weights);

// A draw from the symmetric Dirichlet(1) on the K-simplex.
std::vector<double> sample_flat_dirichlet(RandomStream& rng, int K);

}  // namespace sbm
