#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbm/fit_result.h"
#include "sbm/graph.h"
#include "sbm/models.h"
#include "sbm/random.h"

namespace sbm {

// Latent uniforms u_i in [0,1); node i belongs to the graphon interval
// containing u_i.
struct LatentPositions {
  std::vector<double> u;
};

struct McemConfig {
  int K = 2;
  int em_max_iter = 50;
  // Kept sweeps in EM iteration m (1-based): min(cap, base + increment * (m - 1)).
  int sweeps_base = 20;
  int sweeps_increment = 10;
  int sweeps_cap = 200;
  int thinning = 5;
  // Burn-in sweeps as a fraction of the kept sweeps.
  double burn_in = 0.2;
  int restarts = 10;
  int final_sweeps = 2000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  // Keep the final chain's latent positions in FitResult::latent_trace.
  bool record_trace = false;

  int sweeps_at(int m) const;
  // min(1, m / ceil(em_max_iter / 2)), and 1 at the last iteration.
  double delta_at(int m) const;
  void validate() const;
};

// Metropolis acceptance probability for moving u_j to u_star, a point
// outside u_j's current interval. Combines the Bernoulli likelihood ratio
// over all pairs (j, l) with the proposal correction
// (1 - |current interval|) / (1 - |proposed interval|).
double acceptance_prob(const Network& net, const LatentPositions& u, std::size_t j, double u_star,
                       const GraphonStep& g);

// One Metropolis-within-Gibbs sweep in node order. Each node proposes
// uniformly on [0,1) minus its current interval and keeps its old value
// on rejection. With a single interval every node is redrawn uniformly.
LatentPositions gibbs_sweep(const Network& net, LatentPositions u, const GraphonStep& g,
                            RandomStream& rng);

// For each node, the midpoint of the interval visited most often among
// samples r-1, 2r-1, ... (every r-th sample); ties go to the lower interval.
LatentPositions posterior_mode(std::span<const LatentPositions> samples, const GraphonStep& g,
                               int thinning);

// M step for positions u_hat mapped through g: block probabilities are the
// edge fractions of the induced partition, and
// pi_k = delta * (share of nodes in interval k) + (1 - delta) / K.
GraphonStep graphon_m_step(const Network& net, const LatentPositions& u_hat, const GraphonStep& g,
                           double delta, int K);

// Relative mean difference Gini of a frequency row, normalized by its
// maximum (K-1)/K: 1 for a point mass, 0 for the uniform row.
double gini_uncertainty(std::span<const double> freq);

// Monte-Carlo EM over the step-function graphon with random restarts and
// a final fixed-parameter chain for the allocation frequencies. Binary
// undirected networks only.
FitResult mcem_fit(const Network& net, const McemConfig& cfg);

}  // namespace sbm
