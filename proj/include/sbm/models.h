#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sbm/graph.h"
#include "sbm/matrix.h"

namespace sbm {

enum class ModelKind { kBernoulli, kPoisson, kDcPoisson };

std::string to_string(ModelKind kind);
// Accepts "bernoulli", "poisson", "dc_poisson". Throws UsageError otherwise.
ModelKind parse_model_kind(const std::string& name);

// Block labels are 0-based internally; files and reports use 1..K.
class Partition {
 public:
  Partition() = default;
  // Throws DataError if K < 1 or a label falls outside [0, K).
  Partition(std::vector<int> labels, int K);

  static Partition single_block(std::size_t n) { return Partition(std::vector<int>(n, 0), 1); }

  std::size_t size() const { return labels_.size(); }
  int K() const { return K_; }
  int operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  void set(std::size_t i, int block) { labels_[i] = block; }

  std::vector<std::size_t> block_sizes() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> labels_;
  int K_ = 1;
};

struct BlockParams {
  ModelKind kind = ModelKind::kBernoulli;
  int K = 1;
  std::vector<double> pi;
  // Probabilities for bernoulli, log-rates for the Poisson kinds.
  Matrix block_matrix;
  // Node effects; dc_poisson only.
  std::optional<std::vector<double>> gamma;

  // Throws DataError when an invariant is violated.
  void validate(bool directed) const;
};

// Step-function graphon on [0,1)^2. Boundaries are non-decreasing with
// tau.front() == 0 and tau.back() == 1; a zero-width interval is an empty
// block that no latent position can occupy.
struct GraphonStep {
  std::vector<double> tau;
  Matrix P;

  static GraphonStep from_pi(const std::vector<double>& pi, Matrix P);

  int K() const { return static_cast<int>(tau.size()) - 1; }
  double width(int k) const { return tau[k + 1] - tau[k]; }
  std::vector<double> pi() const;
  // Index k with tau[k] <= u < tau[k+1].
  int interval_of(double u) const;
  double midpoint(int k) const { return tau[k] + width(k) / 2.0; }

  void validate() const;
};

double bernoulli_loglik(const Network& net, const Partition& part, const BlockParams& params);
double poisson_complete_loglik(const Network& net, const Partition& part, const BlockParams& params);
double dc_poisson_loglik(const Network& net, const Partition& part, const BlockParams& params);

// Complete-data log-likelihood: the kind's pair likelihood plus the
// sum of log pi over nodes for the bernoulli and poisson kinds. The
// degree-corrected model carries no mixing term.
double complete_loglik(const Network& net, const Partition& part, const BlockParams& params);

enum class EmptyBlocks { kReject, kAllow };

// Closed-form maximum likelihood estimates for a fixed partition.
// Cells without possible pairs take the global density (bernoulli) or the
// global log-rate (poisson kinds). Degree-corrected node effects satisfy
// sum_{i in k} exp(gamma_i) = n_k. With EmptyBlocks::kAllow an empty
// block gets pi_k = 0 instead of an error.
BlockParams mle_block_params(const Network& net, const Partition& part, ModelKind kind,
                             EmptyBlocks empty = EmptyBlocks::kReject);

// complete_loglik at the maximum likelihood parameters of `part`; empty
// blocks contribute nothing.
double profile_loglik(const Network& net, const Partition& part, ModelKind kind);

double graphon_eval(const GraphonStep& g, double u, double v);

}  // namespace sbm
