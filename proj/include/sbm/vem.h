#pragma once

#include <cstdint>

#include "sbm/fit_result.h"
#include "sbm/graph.h"
#include "sbm/matrix.h"
#include "sbm/models.h"

namespace sbm {

// Mean-field state: xi(i, k) approximates P(Z_i = k | y).
struct VariationalState {
  Matrix xi;
  BlockParams params;
  double elbo = 0.0;
};

struct VemConfig {
  int K = 2;
  int max_iter = 200;
  double tol = 1e-6;
  int restarts = 10;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// Expected complete-data log-likelihood under xi plus the entropy of xi.
// The log y! term of the Poisson kind is dropped.
double elbo(const Network& net, const VariationalState& state);

// One sweep of coordinate ascent over the rows of xi in node order with
// params held fixed; each row is updated from the freshest rows of the
// other nodes.
VariationalState e_step(const Network& net, VariationalState state);

// Closed-form maximization over pi and the block matrix for fixed xi.
VariationalState m_step(const Network& net, VariationalState state);

// Each restart draws Dirichlet(1) rows, hardens them to their argmax and
// runs classification sweeps (e_step, harden, m_step) until the hard
// labels settle, then alternates e_step and m_step until the ELBO gain
// drops below tol. Keeps the restart with the largest ELBO.
// kind must be bernoulli or poisson.
FitResult vem_fit(const Network& net, const VemConfig& cfg, ModelKind kind);

}  // namespace sbm
