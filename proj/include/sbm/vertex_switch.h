#pragma once

#include <cstdint>

#include "sbm/fit_result.h"
#include "sbm/graph.h"
#include "sbm/models.h"

namespace sbm {

struct SwitchConfig {
  int K = 2;
  int restarts = 20;
  int max_passes = 100;
  std::uint64_t seed = 0;
  ModelKind kind = ModelKind::kBernoulli;
  // Plain greedy single-vertex moves instead of Kernighan-Lin passes.
  bool greedy = false;
  std::size_t workers = 1;
};

struct MoveDelta {
  double value = 0.0;
  // The move leaves the vertex's old block empty.
  bool empties_block = false;
};

// Change of the profile log-likelihood when `vertex` moves to block `to`,
// from the block statistics touched by the move.
MoveDelta delta_loglik(const Network& net, const Partition& part, std::size_t vertex, int to,
                       ModelKind kind);

// Kernighan-Lin style search over partitions with random restarts. Each
// pass visits every vertex once in index order and moves it to its best
// other block even when that lowers the objective; the best state seen in
// the pass seeds the next one. A pass without gain is followed by a greedy
// pass; the search stops when neither improves, so the result admits no
// improving single-vertex move.
FitResult switch_fit(const Network& net, const SwitchConfig& cfg);

}  // namespace sbm
