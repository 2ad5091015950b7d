#include "sbm/models.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sbm/block_stats.h"
#include "sbm/errors.h"

namespace sbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// count * log(x), with 0 * log(anything) = 0 and count * log 0 = -inf.
double weighted_log(double count, double x) {
  if (count <= 0.0) return 0.0;
  if (x <= 0.0) return kNegInf;
  return count * std::log(x);
}

void check_inputs(const Network& net, const Partition& part, const BlockParams& params,
                  ModelKind expected) {
  if (params.kind != expected) throw DataError("parameter kind does not match the model");
  if (part.size() != net.size()) throw DataError("partition length does not match network size");
  if (part.K() != params.K) throw DataError("partition K does not match parameter K");
  params.validate(net.directed());
}

template <typename CellFn>
double sum_cells(const Network& net, int K, CellFn&& fn) {
  double total = 0.0;
  for (int k = 0; k < K; ++k)
    for (int l = net.directed() ? 0 : k; l < K; ++l) total += fn(k, l);
  return total;
}

double mixing_term(const Partition& part, const std::vector<double>& pi) {
  auto sizes = part.block_sizes();
  double total = 0.0;
  for (int k = 0; k < part.K(); ++k) total += weighted_log(static_cast<double>(sizes[k]), pi[k]);
  return total;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kBernoulli: return "bernoulli";
    case ModelKind::kPoisson: return "poisson";
    case ModelKind::kDcPoisson: return "dc_poisson";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "bernoulli") return ModelKind::kBernoulli;
  if (name == "poisson") return ModelKind::kPoisson;
  if (name == "dc_poisson") return ModelKind::kDcPoisson;
  throw UsageError("unknown model '" + name + "' (expected bernoulli, poisson or dc_poisson)");
}

Partition::Partition(std::vector<int> labels, int K) : labels_(std::move(labels)), K_(K) {
  if (K_ < 1) throw DataError("partition needs K >= 1");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= K_)
      throw DataError("label of node " + std::to_string(i) + " out of range");
  }
}

std::vector<std::size_t> Partition::block_sizes() const {
  std::vector<std::size_t> sizes(K_, 0);
  for (int z : labels_) ++sizes[z];
  return sizes;
}

void BlockParams::validate(bool directed) const {
  if (K < 1) throw DataError("parameters need K >= 1");
  if (pi.size() != static_cast<std::size_t>(K)) throw DataError("pi must have K entries");
  double sum = 0.0;
  for (double p : pi) {
    if (!(p >= 0.0)) throw DataError("pi entries must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DataError("pi must sum to 1");
  if (block_matrix.rows() != static_cast<std::size_t>(K) || block_matrix.cols() != static_cast<std::size_t>(K))
    throw DataError("block matrix must be K x K");
  for (double v : block_matrix.data()) {
    if (std::isnan(v)) throw DataError("block matrix contains NaN");
    if (kind == ModelKind::kBernoulli && !(v >= 0.0 && v <= 1.0))
      throw DataError("bernoulli block probabilities must lie in [0,1]");
  }
  if (!directed && !block_matrix.is_symmetric(1e-9))
    throw DataError("block matrix must be symmetric for undirected networks");
  if (kind == ModelKind::kDcPoisson && !gamma) throw DataError("dc_poisson parameters need gamma");
  if (kind != ModelKind::kDcPoisson && gamma) throw DataError("gamma is only valid for dc_poisson");
}

GraphonStep GraphonStep::from_pi(const std::vector<double>& pi, Matrix P) {
  GraphonStep g;
  g.tau.assign(pi.size() + 1, 0.0);
  for (std::size_t k = 0; k < pi.size(); ++k) g.tau[k + 1] = g.tau[k] + pi[k];
  g.tau.back() = 1.0;
  for (double& t : g.tau) t = std::min(t, 1.0);
  g.P = std::move(P);
  return g;
}

std::vector<double> GraphonStep::pi() const {
  std::vector<double> result(K());
  for (int k = 0; k < K(); ++k) result[k] = width(k);
  return result;
}

int GraphonStep::interval_of(double u) const {
  auto it = std::upper_bound(tau.begin(), tau.end(), u);
  int k = static_cast<int>(it - tau.begin()) - 1;
  return std::clamp(k, 0, K() - 1);
}

void GraphonStep::validate() const {
  if (tau.size() < 2) throw DataError("graphon needs at least one interval");
  if (tau.front() != 0.0 || tau.back() != 1.0) throw DataError("graphon boundaries must span [0,1]");
  for (std::size_t k = 1; k < tau.size(); ++k)
    if (tau[k] < tau[k - 1]) throw DataError("graphon boundaries must be non-decreasing");
  const auto K = static_cast<std::size_t>(this->K());
  if (P.rows() != K || P.cols() != K) throw DataError("graphon matrix must be K x K");
  for (double v : P.data())
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("graphon probabilities must lie in [0,1]");
  if (!P.is_symmetric(1e-12)) throw DataError("graphon matrix must be symmetric");
}

double bernoulli_loglik(const Network& net, const Partition& part, const BlockParams& params) {
  if (!net.is_binary()) throw DataError("bernoulli likelihood needs a binary network");
  check_inputs(net, part, params, ModelKind::kBernoulli);
  BlockStats stats(net, part, ModelKind::kBernoulli);
  return sum_cells(net, part.K(), [&](int k, int l) {
    const double p = params.block_matrix(k, l);
    const double e = stats.edge_total(k, l);
    const double pairs = stats.pair_count(k, l);
    return weighted_log(e, p) + weighted_log(pairs - e, 1.0 - p);
  });
}

double poisson_complete_loglik(const Network& net, const Partition& part, const BlockParams& params) {
  check_inputs(net, part, params, ModelKind::kPoisson);
  BlockStats stats(net, part, ModelKind::kPoisson);
  const double pairs_term = sum_cells(net, part.K(), [&](int k, int l) {
    const double omega = params.block_matrix(k, l);
    const double e = stats.edge_total(k, l);
    const double edge_part = e > 0.0 ? e * omega : 0.0;
    return edge_part - stats.pair_count(k, l) * std::exp(omega);
  });
  return pairs_term + mixing_term(part, params.pi);
}

double dc_poisson_loglik(const Network& net, const Partition& part, const BlockParams& params) {
  check_inputs(net, part, params, ModelKind::kDcPoisson);
  const std::vector<double>& gamma = *params.gamma;
  if (gamma.size() != net.size()) throw DataError("gamma must have one entry per node");
  const int K = part.K();
  BlockStats stats(net, part, ModelKind::kPoisson);
  DegreeVector d = degrees(net);

  double node_part = 0.0;
  std::vector<double> s(K, 0.0), q(K, 0.0);
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (d[i] > 0) node_part += static_cast<double>(d[i]) * gamma[i];
    const double theta = std::exp(gamma[i]);
    s[part[i]] += theta;
    q[part[i]] += theta * theta;
  }
  const double cells = sum_cells(net, K, [&](int k, int l) {
    const double omega = params.block_matrix(k, l);
    const double e = stats.edge_total(k, l);
    double weight;
    if (k != l) {
      weight = s[k] * s[l];
    } else {
      weight = s[k] * s[k] - q[k];
      if (!net.directed()) weight /= 2.0;
    }
    const double edge_part = e > 0.0 ? e * omega : 0.0;
    return edge_part - weight * std::exp(omega);
  });
  return node_part + cells;
}

double complete_loglik(const Network& net, const Partition& part, const BlockParams& params) {
  switch (params.kind) {
    case ModelKind::kBernoulli:
      return bernoulli_loglik(net, part, params) + mixing_term(part, params.pi);
    case ModelKind::kPoisson:
      return poisson_complete_loglik(net, part, params);
    case ModelKind::kDcPoisson:
      return dc_poisson_loglik(net, part, params);
  }
  return kNegInf;
}

BlockParams mle_block_params(const Network& net, const Partition& part, ModelKind kind,
                             EmptyBlocks empty) {
  if (part.size() != net.size()) throw DataError("partition length does not match network size");
  if (kind == ModelKind::kBernoulli && !net.is_binary())
    throw DataError("bernoulli model needs a binary network");
  const int K = part.K();
  auto sizes = part.block_sizes();
  if (empty == EmptyBlocks::kReject) {
    for (int k = 0; k < K; ++k)
      if (sizes[k] == 0) throw DataError("block " + std::to_string(k + 1) + " is empty");
  }
  BlockStats stats(net, part, ModelKind::kBernoulli);
  const double n = static_cast<double>(net.size());
  const double global_rate = static_cast<double>(net.total_value()) / net.num_pairs();

  BlockParams params;
  params.kind = kind;
  params.K = K;
  params.pi.resize(K);
  for (int k = 0; k < K; ++k) params.pi[k] = static_cast<double>(sizes[k]) / n;
  params.block_matrix = Matrix(K, K, 0.0);

  DegreeVector d;
  std::vector<double> kappa(K, 0.0), sumsq(K, 0.0);
  if (kind == ModelKind::kDcPoisson) {
    d = degrees(net);
    for (std::size_t i = 0; i < net.size(); ++i) {
      kappa[part[i]] += static_cast<double>(d[i]);
      sumsq[part[i]] += static_cast<double>(d[i]) * static_cast<double>(d[i]);
    }
    std::vector<double> gamma(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
      const int k = part[i];
      gamma[i] = d[i] > 0 ? std::log(static_cast<double>(d[i]) * static_cast<double>(sizes[k]) / kappa[k])
                          : kNegInf;
    }
    params.gamma = std::move(gamma);
  }

  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < K; ++l) {
      const double pairs = stats.pair_count(k, l);
      const double e = stats.edge_total(k, l);
      double value = 0.0;
      switch (kind) {
        case ModelKind::kBernoulli:
          value = pairs > 0.0 ? e / pairs : global_rate;
          break;
        case ModelKind::kPoisson:
          value = std::log(pairs > 0.0 ? e / pairs : global_rate);
          break;
        case ModelKind::kDcPoisson: {
          if (pairs <= 0.0) {
            value = std::log(global_rate);
          } else if (e <= 0.0) {
            value = kNegInf;
          } else {
            const double sk = static_cast<double>(sizes[k]);
            double weight;
            if (k != l) {
              weight = sk * static_cast<double>(sizes[l]);
            } else {
              weight = sk * sk - sk * sk * sumsq[k] / (kappa[k] * kappa[k]);
              if (!net.directed()) weight /= 2.0;
            }
            value = std::log(e / weight);
          }
          break;
        }
      }
      params.block_matrix(k, l) = value;
    }
  }
  return params;
}

double profile_loglik(const Network& net, const Partition& part, ModelKind kind) {
  if (kind == ModelKind::kBernoulli && !net.is_binary())
    throw DataError("bernoulli model needs a binary network");
  return BlockStats(net, part, kind).objective();
}

double graphon_eval(const GraphonStep& g, double u, double v) {
  if (!(u >= 0.0 && u < 1.0) || !(v >= 0.0 && v < 1.0))
    throw DataError("graphon arguments must lie in [0,1)");
  return g.P(g.interval_of(u), g.interval_of(v));
}

}  // namespace sbm
