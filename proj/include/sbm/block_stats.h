#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sbm/graph.h"
#include "sbm/matrix.h"
#include "sbm/models.h"

namespace sbm {

// Sufficient statistics of a labelled network for the profile
// log-likelihood: block sizes, block-pair edge totals and, for the
// degree-corrected model, per-block degree sums and squared-degree sums.
//
// Undirected networks keep edge_totals symmetric with the within-block
// total on the diagonal; directed networks keep ordered totals k -> l.
// Moving one vertex touches only the rows and columns of its old and new
// block, which is what makes single-vertex deltas O(deg + K).
class BlockStats {
 public:
  BlockStats(const Network& net, Partition part, ModelKind kind);

  const Partition& partition() const { return part_; }
  ModelKind kind() const { return kind_; }
  int K() const { return part_.K(); }
  double block_size(int k) const { return sizes_[k]; }
  double edge_total(int k, int l) const { return edges_(k, l); }
  // Possible pairs between blocks k and l (unordered when undirected).
  double pair_count(int k, int l) const;

  // Profile log-likelihood; see profile_loglik.
  double objective() const;

  struct Delta {
    double value = 0.0;
    bool empties_block = false;
  };
  // Objective change when `v` moves to `to`; the state is left unchanged.
  Delta move_delta(std::size_t v, int to);

  void move(std::size_t v, int to);

 private:
  void gather_weights(std::size_t v);
  void shift(std::size_t v, int block, double sign);
  double cell_term(int k, int l) const;
  double block_term(int k) const;
  double affected_terms(int a, int b) const;

  const Network* net_;
  Partition part_;
  ModelKind kind_;
  double n_;
  std::vector<double> sizes_;
  Matrix edges_;
  // degree-corrected only
  std::vector<double> node_degree_;
  std::vector<double> kappa_;
  std::vector<double> sumsq_;
  double degree_entropy_ = 0.0;
  // scratch: edge weight from the moving vertex into each block
  std::vector<double> out_w_;
  std::vector<double> in_w_;
};

}  // namespace sbm
