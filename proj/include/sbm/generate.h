#pragma once

#include <cstdint>
#include <utility>

#include "sbm/graph.h"
#include "sbm/models.h"

namespace sbm {

struct GenConfig {
  std::size_t n = 2;
  BlockParams params;
  bool directed = false;
  std::uint64_t seed = 0;
};

// Draws labels i.i.d. from pi, then every pair independently:
// Bernoulli(p_kl) for bernoulli, Poisson(exp(omega_kl)) for poisson and
// Poisson(exp(gamma_i + gamma_j + omega_kl)) for dc_poisson. Each pair
// uses its own random stream, so the output depends only on `cfg`.
std::pair<Network, Partition> sample_sbm(const GenConfig& cfg);

}  // namespace sbm
