#include "sbm/block_stats.h"

#include <cmath>

#include "sbm/errors.h"

namespace sbm {

namespace {

// x log x with 0 log 0 = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

BlockStats::BlockStats(const Network& net, Partition part, ModelKind kind)
    : net_(&net), part_(std::move(part)), kind_(kind), n_(static_cast<double>(net.size())) {
  if (part_.size() != net.size()) throw DataError("partition length does not match network size");
  const int K = part_.K();
  sizes_.assign(K, 0.0);
  edges_ = Matrix(K, K, 0.0);
  for (std::size_t i = 0; i < net.size(); ++i) sizes_[part_[i]] += 1.0;
  for (const Edge& e : net.edges()) {
    const int a = part_[e.src];
    const int b = part_[e.dst];
    edges_(a, b) += static_cast<double>(e.value);
    if (!net.directed() && a != b) edges_(b, a) += static_cast<double>(e.value);
  }
  if (kind_ == ModelKind::kDcPoisson) {
    DegreeVector d = degrees(net);
    node_degree_.assign(d.begin(), d.end());
    kappa_.assign(K, 0.0);
    sumsq_.assign(K, 0.0);
    for (std::size_t i = 0; i < net.size(); ++i) {
      kappa_[part_[i]] += node_degree_[i];
      sumsq_[part_[i]] += node_degree_[i] * node_degree_[i];
      degree_entropy_ += xlogx(node_degree_[i]);
    }
  }
  out_w_.assign(K, 0.0);
  in_w_.assign(K, 0.0);
}

double BlockStats::pair_count(int k, int l) const {
  if (k != l) return sizes_[k] * sizes_[l];
  const double pairs = sizes_[k] * (sizes_[k] - 1.0);
  return net_->directed() ? pairs : pairs / 2.0;
}

double BlockStats::cell_term(int k, int l) const {
  const double e = edges_(k, l);
  switch (kind_) {
    case ModelKind::kBernoulli: {
      const double pairs = pair_count(k, l);
      if (pairs <= 0.0) return 0.0;
      return xlogx(e) + xlogx(pairs - e) - xlogx(pairs);
    }
    case ModelKind::kPoisson: {
      if (e <= 0.0) return 0.0;
      return e * std::log(e / pair_count(k, l)) - e;
    }
    case ModelKind::kDcPoisson: {
      if (e <= 0.0) return 0.0;
      // With exp(gamma_i) = d_i n_k / kappa_k the block sums of exp(gamma)
      // equal n_k and the sums of exp(2 gamma) are n_k^2 sumsq_k / kappa_k^2.
      double weight;
      if (k != l) {
        weight = sizes_[k] * sizes_[l];
      } else {
        const double s = sizes_[k];
        const double q = s * s * sumsq_[k] / (kappa_[k] * kappa_[k]);
        weight = net_->directed() ? s * s - q : (s * s - q) / 2.0;
      }
      return e * std::log(e / weight) - e;
    }
  }
  return 0.0;
}

double BlockStats::block_term(int k) const {
  if (kind_ == ModelKind::kDcPoisson) {
    return kappa_[k] > 0.0 ? kappa_[k] * std::log(sizes_[k] / kappa_[k]) : 0.0;
  }
  return sizes_[k] > 0.0 ? sizes_[k] * std::log(sizes_[k] / n_) : 0.0;
}

double BlockStats::objective() const {
  const int K = part_.K();
  double total = kind_ == ModelKind::kDcPoisson ? degree_entropy_ : 0.0;
  for (int k = 0; k < K; ++k) {
    total += block_term(k);
    for (int l = net_->directed() ? 0 : k; l < K; ++l) total += cell_term(k, l);
  }
  return total;
}

double BlockStats::affected_terms(int a, int b) const {
  const int K = part_.K();
  double total = block_term(a) + block_term(b);
  if (!net_->directed()) {
    for (int l = 0; l < K; ++l) total += cell_term(std::min(a, l), std::max(a, l));
    for (int l = 0; l < K; ++l)
      if (l != a) total += cell_term(std::min(b, l), std::max(b, l));
    return total;
  }
  for (int l = 0; l < K; ++l) total += cell_term(a, l);
  for (int l = 0; l < K; ++l)
    if (l != a) total += cell_term(l, a);
  for (int l = 0; l < K; ++l)
    if (l != a) total += cell_term(b, l);
  for (int l = 0; l < K; ++l)
    if (l != a && l != b) total += cell_term(l, b);
  return total;
}

void BlockStats::gather_weights(std::size_t v) {
  std::fill(out_w_.begin(), out_w_.end(), 0.0);
  std::fill(in_w_.begin(), in_w_.end(), 0.0);
  for (const Neighbor& nb : net_->out_neighbors(v)) out_w_[part_[nb.node]] += static_cast<double>(nb.value);
  if (net_->directed())
    for (const Neighbor& nb : net_->in_neighbors(v)) in_w_[part_[nb.node]] += static_cast<double>(nb.value);
}

// Adds (sign = +1) or removes (sign = -1) vertex v as a member of `block`,
// using the neighbour weights gathered for v.
void BlockStats::shift(std::size_t v, int block, double sign) {
  const int K = part_.K();
  if (net_->directed()) {
    for (int l = 0; l < K; ++l) {
      edges_(block, l) += sign * out_w_[l];
      edges_(l, block) += sign * in_w_[l];
    }
  } else {
    for (int l = 0; l < K; ++l) {
      edges_(block, l) += sign * out_w_[l];
      if (l != block) edges_(l, block) += sign * out_w_[l];
    }
  }
  sizes_[block] += sign;
  if (kind_ == ModelKind::kDcPoisson) {
    kappa_[block] += sign * node_degree_[v];
    sumsq_[block] += sign * node_degree_[v] * node_degree_[v];
  }
}

BlockStats::Delta BlockStats::move_delta(std::size_t v, int to) {
  const int from = part_[v];
  if (to == from) throw DataError("move target equals the current block");
  if (to < 0 || to >= part_.K()) throw DataError("move target out of range");
  gather_weights(v);
  const double before = affected_terms(from, to);
  shift(v, from, -1.0);
  shift(v, to, +1.0);
  const double after = affected_terms(from, to);
  shift(v, to, -1.0);
  shift(v, from, +1.0);
  return {after - before, sizes_[from] == 1.0};
}

void BlockStats::move(std::size_t v, int to) {
  const int from = part_[v];
  if (to == from) return;
  gather_weights(v);
  shift(v, from, -1.0);
  shift(v, to, +1.0);
  part_.set(v, to);
}

}  // namespace sbm
