#include "sbm/vem.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "sbm/errors.h"
#include "sbm/parallel.h"
#include "sbm/random.h"

namespace sbm {

namespace {

// Stand-in for log 0 so that zero-probability cells stay finite in sums.
constexpr double kLogFloor = -700.0;
// Weighted pair mass below which a cell counts as empty.
constexpr double kEmptyCellMass = 1e-10;

double safe_log(double x) { return x > 0.0 ? std::max(std::log(x), kLogFloor) : kLogFloor; }

// Pair log-density y * A_kl + B_kl.
struct CellLogs {
  Matrix A;
  Matrix B;
  std::vector<double> log_pi;
};

CellLogs cell_logs(const BlockParams& params) {
  const int K = params.K;
  CellLogs logs{Matrix(K, K), Matrix(K, K), std::vector<double>(K)};
  for (int k = 0; k < K; ++k) {
    logs.log_pi[k] = safe_log(params.pi[k]);
    for (int l = 0; l < K; ++l) {
      const double v = params.block_matrix(k, l);
      if (params.kind == ModelKind::kBernoulli) {
        logs.A(k, l) = safe_log(v) - safe_log(1.0 - v);
        logs.B(k, l) = safe_log(1.0 - v);
      } else {
        logs.A(k, l) = std::max(v, kLogFloor);
        logs.B(k, l) = -std::exp(v);
      }
    }
  }
  return logs;
}

// Ordered-pair sums over i != j: edge mass M_kl = sum y_ij xi_ik xi_jl and
// pair mass P_kl = sum xi_ik xi_jl.
struct PairMass {
  Matrix M;
  Matrix P;
  std::vector<double> s;
};

PairMass pair_mass(const Network& net, const Matrix& xi) {
  const std::size_t n = net.size();
  const int K = static_cast<int>(xi.cols());
  PairMass mass{Matrix(K, K, 0.0), Matrix(K, K, 0.0), std::vector<double>(K, 0.0)};
  Matrix self(K, K, 0.0);
  std::vector<double> m(K);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(m.begin(), m.end(), 0.0);
    for (const Neighbor& nb : net.out_neighbors(i)) {
      const double y = static_cast<double>(nb.value);
      for (int l = 0; l < K; ++l) m[l] += y * xi(nb.node, l);
    }
    for (int k = 0; k < K; ++k) {
      const double a = xi(i, k);
      mass.s[k] += a;
      if (a == 0.0) continue;
      for (int l = 0; l < K; ++l) {
        mass.M(k, l) += a * m[l];
        self(k, l) += a * xi(i, l);
      }
    }
  }
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) mass.P(k, l) = std::max(0.0, mass.s[k] * mass.s[l] - self(k, l));
  return mass;
}

void check_state(const Network& net, const VariationalState& state) {
  if (state.xi.rows() != net.size()) throw DataError("xi must have one row per node");
  if (state.xi.cols() != static_cast<std::size_t>(state.params.K)) throw DataError("xi must have K columns");
  if (state.params.kind == ModelKind::kDcPoisson)
    throw DataError("variational EM supports the bernoulli and poisson kinds");
}

int argmax_row(const Matrix& xi, std::size_t i) {
  int best = 0;
  for (std::size_t k = 1; k < xi.cols(); ++k)
    if (xi(i, k) > xi(i, best)) best = static_cast<int>(k);
  return best;
}

// Per-node argmax labels, or nothing when some block would be left empty.
std::optional<std::vector<int>> hard_labels(const Matrix& xi) {
  std::vector<int> labels(xi.rows());
  std::vector<bool> used(xi.cols(), false);
  for (std::size_t i = 0; i < xi.rows(); ++i) {
    labels[i] = argmax_row(xi, i);
    used[labels[i]] = true;
  }
  for (bool u : used)
    if (!u) return std::nullopt;
  return labels;
}

void set_hard(Matrix& xi, const std::vector<int>& labels) {
  for (std::size_t i = 0; i < xi.rows(); ++i)
    for (std::size_t k = 0; k < xi.cols(); ++k) xi(i, k) = static_cast<int>(k) == labels[i] ? 1.0 : 0.0;
}

// Soft rows near the simplex centre shrink the block contrast of the M
// step quadratically, which drives mean-field updates to the uninformative
// fixed point. Rows are therefore hardened to their argmax and refined by
// classification sweeps until the labels settle. A sweep that would empty
// a block ends the warm-up at the preceding labels, since a block with
// pi_k = 0 can never be re-entered.
VariationalState classification_warmup(const Network& net, VariationalState state, int max_sweeps) {
  auto labels = hard_labels(state.xi);
  if (!labels) return m_step(net, std::move(state));
  set_hard(state.xi, *labels);
  state = m_step(net, std::move(state));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    VariationalState trial = e_step(net, state);
    auto next = hard_labels(trial.xi);
    if (!next || *next == *labels) break;
    labels = std::move(next);
    set_hard(trial.xi, *labels);
    state = m_step(net, std::move(trial));
  }
  return state;
}

}  // namespace

double elbo(const Network& net, const VariationalState& state) {
  check_state(net, state);
  const int K = state.params.K;
  const CellLogs logs = cell_logs(state.params);
  const PairMass mass = pair_mass(net, state.xi);
  double pairs = 0.0;
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      if (mass.M(k, l) != 0.0) pairs += mass.M(k, l) * logs.A(k, l);
      if (mass.P(k, l) != 0.0) pairs += mass.P(k, l) * logs.B(k, l);
    }
  if (!net.directed()) pairs /= 2.0;

  double entropy_part = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i)
    for (int k = 0; k < K; ++k) {
      const double x = state.xi(i, k);
      if (x > 0.0) entropy_part += x * (logs.log_pi[k] - std::log(x));
    }
  return pairs + entropy_part;
}

VariationalState e_step(const Network& net, VariationalState state) {
  check_state(net, state);
  const std::size_t n = net.size();
  const int K = state.params.K;
  const CellLogs logs = cell_logs(state.params);
  Matrix& xi = state.xi;

  std::vector<double> s(K, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k) s[k] += xi(i, k);

  std::vector<double> m_out(K), m_in(K), rest(K), score(K);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(m_out.begin(), m_out.end(), 0.0);
    std::fill(m_in.begin(), m_in.end(), 0.0);
    for (const Neighbor& nb : net.out_neighbors(i))
      for (int l = 0; l < K; ++l) m_out[l] += static_cast<double>(nb.value) * xi(nb.node, l);
    if (net.directed())
      for (const Neighbor& nb : net.in_neighbors(i))
        for (int l = 0; l < K; ++l) m_in[l] += static_cast<double>(nb.value) * xi(nb.node, l);
    for (int l = 0; l < K; ++l) rest[l] = s[l] - xi(i, l);

    for (int k = 0; k < K; ++k) {
      double v = logs.log_pi[k];
      for (int l = 0; l < K; ++l) {
        v += logs.A(k, l) * m_out[l] + logs.B(k, l) * rest[l];
        if (net.directed()) v += logs.A(l, k) * m_in[l] + logs.B(l, k) * rest[l];
      }
      score[k] = v;
    }
    const double top = *std::max_element(score.begin(), score.end());
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      score[k] = std::exp(score[k] - top);
      total += score[k];
    }
    for (int k = 0; k < K; ++k) {
      const double updated = score[k] / total;
      s[k] += updated - xi(i, k);
      xi(i, k) = updated;
    }
  }
  state.elbo = elbo(net, state);
  return state;
}

VariationalState m_step(const Network& net, VariationalState state) {
  check_state(net, state);
  const int K = state.params.K;
  const PairMass mass = pair_mass(net, state.xi);
  const double global_rate = static_cast<double>(net.total_value()) / net.num_pairs();
  const bool bernoulli = state.params.kind == ModelKind::kBernoulli;

  double pi_total = 0.0;
  for (int k = 0; k < K; ++k) pi_total += mass.s[k];
  for (int k = 0; k < K; ++k) state.params.pi[k] = mass.s[k] / pi_total;

  Matrix& cells = state.params.block_matrix;
  for (int k = 0; k < K; ++k) {
    for (int l = net.directed() ? 0 : k; l < K; ++l) {
      const double pairs = mass.P(k, l);
      const double rate = pairs > kEmptyCellMass ? mass.M(k, l) / pairs : global_rate;
      const double value = bernoulli ? std::min(rate, 1.0) : std::log(rate);
      cells(k, l) = value;
      if (!net.directed()) cells(l, k) = value;
    }
  }
  state.elbo = elbo(net, state);
  return state;
}

FitResult vem_fit(const Network& net, const VemConfig& cfg, ModelKind kind) {
  if (kind == ModelKind::kDcPoisson) throw UsageError("vem supports the bernoulli and poisson models");
  if (kind == ModelKind::kBernoulli && !net.is_binary()) throw DataError("bernoulli model needs a binary network");
  if (cfg.K < 1) throw UsageError("K must be at least 1");
  if (static_cast<std::size_t>(cfg.K) > net.size()) throw UsageError("K exceeds the number of nodes");
  if (!(cfg.tol > 0.0)) throw UsageError("tol must be positive");
  if (cfg.restarts < 1) throw UsageError("restarts must be at least 1");

  const int K = cfg.K;
  const std::size_t n = net.size();
  struct Run {
    VariationalState state;
    std::vector<double> trace;
  };
  std::vector<Run> runs(cfg.restarts);

  run_restarts(runs.size(), cfg.workers, [&](std::size_t r) {
    RandomStream rng(cfg.seed, r);
    VariationalState state;
    state.xi = Matrix(n, K);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = sample_flat_dirichlet(rng, K);
      for (int k = 0; k < K; ++k) state.xi(i, k) = row[k];
    }
    state.params.kind = kind;
    state.params.K = K;
    state.params.pi.assign(K, 1.0 / K);
    state.params.block_matrix = Matrix(K, K, kind == ModelKind::kBernoulli ? 0.5 : 0.0);
    state = classification_warmup(net, std::move(state), cfg.max_iter);
    std::vector<double> trace{state.elbo};
    for (int it = 0; it < cfg.max_iter; ++it) {
      const double before = state.elbo;
      state = m_step(net, e_step(net, std::move(state)));
      trace.push_back(state.elbo);
      if (state.elbo - before < cfg.tol) break;
    }
    runs[r] = {std::move(state), std::move(trace)};
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].state.elbo > runs[best].state.elbo) best = r;
  const VariationalState& state = runs[best].state;

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = argmax_row(state.xi, i);

  FitResult fit;
  fit.engine = "vem";
  fit.model = kind;
  fit.K = K;
  fit.directed = net.directed();
  fit.node_labels = net.labels();
  fit.partition = Partition(std::move(labels), K);
  fit.params = state.params;
  fit.objective = state.elbo;
  fit.loglik = profile_loglik(net, fit.partition, kind);
  fit.objective_trace = runs[best].trace;
  fit.best_restart = best;
  fit.config = {{"K", K},           {"max_iter", cfg.max_iter}, {"tol", cfg.tol},
                {"restarts", cfg.restarts}, {"seed", cfg.seed},     {"method", "vem"},
                {"model", to_string(kind)}};
  return fit;
}

}  // namespace sbm
