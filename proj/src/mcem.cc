#include "sbm/mcem.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sbm/errors.h"
#include "sbm/parallel.h"

namespace sbm {

namespace {

constexpr double kMinProb = 1e-6;
constexpr double kMaxProb = 1.0 - 1e-6;

// Chain state with cached interval memberships and occupancy counts, so a
// Metropolis step costs O(deg + K).
class GibbsChain {
 public:
  GibbsChain(const Network& net, const GraphonStep& g, std::vector<double> u)
      : net_(net), g_(g), u_(std::move(u)), K_(g.K()) {
    log_p_ = Matrix(K_, K_);
    log_q_ = Matrix(K_, K_);
    for (int k = 0; k < K_; ++k)
      for (int l = 0; l < K_; ++l) {
        const double p = std::clamp(g.P(k, l), kMinProb, kMaxProb);
        log_p_(k, l) = std::log(p);
        log_q_(k, l) = std::log1p(-p);
      }
    interval_.resize(u_.size());
    occupancy_.assign(K_, 0.0);
    for (std::size_t i = 0; i < u_.size(); ++i) {
      interval_[i] = g.interval_of(u_[i]);
      occupancy_[interval_[i]] += 1.0;
    }
    neighbors_in_.assign(K_, 0.0);
  }

  void sweep(RandomStream& rng) {
    for (std::size_t j = 0; j < u_.size(); ++j) step(j, rng);
  }

  const std::vector<double>& u() const { return u_; }
  const std::vector<int>& intervals() const { return interval_; }

 private:
  void step(std::size_t j, RandomStream& rng) {
    const int current = interval_[j];
    const double width = g_.width(current);
    const double outside = 1.0 - width;
    if (K_ == 1 || outside <= 0.0) {
      u_[j] = rng.uniform();
      (void)rng.uniform();
      return;
    }
    const double v = rng.uniform() * outside;
    double proposal = v < g_.tau[current] ? v : v + width;
    if (proposal >= 1.0) proposal = std::nextafter(1.0, 0.0);
    const double accept_draw = rng.uniform();
    const int target = g_.interval_of(proposal);
    if (target == current) return;

    std::fill(neighbors_in_.begin(), neighbors_in_.end(), 0.0);
    for (const Neighbor& nb : net_.out_neighbors(j)) neighbors_in_[interval_[nb.node]] += 1.0;
    double log_ratio = std::log(outside) - std::log(1.0 - g_.width(target));
    for (int l = 0; l < K_; ++l) {
      const double others = occupancy_[l] - (l == current ? 1.0 : 0.0);
      const double linked = neighbors_in_[l];
      log_ratio += linked * (log_p_(target, l) - log_p_(current, l)) +
                   (others - linked) * (log_q_(target, l) - log_q_(current, l));
    }
    if (log_ratio >= 0.0 || accept_draw < std::exp(log_ratio)) {
      u_[j] = proposal;
      interval_[j] = target;
      occupancy_[current] -= 1.0;
      occupancy_[target] += 1.0;
    }
  }

  const Network& net_;
  const GraphonStep& g_;
  std::vector<double> u_;
  int K_;
  Matrix log_p_;
  Matrix log_q_;
  std::vector<int> interval_;
  std::vector<double> occupancy_;
  std::vector<double> neighbors_in_;
};

// Per-node interval visit counts.
class VisitCounter {
 public:
  VisitCounter(std::size_t n, int K) : K_(K), counts_(n * K, 0.0) {}

  void add(const std::vector<int>& intervals) {
    for (std::size_t i = 0; i < intervals.size(); ++i) counts_[i * K_ + intervals[i]] += 1.0;
    ++samples_;
  }
  std::size_t samples() const { return samples_; }
  double count(std::size_t i, int k) const { return counts_[i * K_ + k]; }

  std::vector<int> modes() const {
    std::vector<int> mode(counts_.size() / K_, 0);
    for (std::size_t i = 0; i < mode.size(); ++i)
      for (int k = 1; k < K_; ++k)
        if (count(i, k) > count(i, mode[i])) mode[i] = k;
    return mode;
  }

 private:
  int K_;
  std::vector<double> counts_;
  std::size_t samples_ = 0;
};

void check_network(const Network& net) {
  if (!net.is_binary()) throw DataError("mcem needs a binary network");
  if (net.directed()) throw DataError("mcem supports undirected networks only");
}

void check_positions(const Network& net, const LatentPositions& u) {
  if (u.u.size() != net.size()) throw DataError("one latent position per node is required");
  for (double x : u.u)
    if (!(x >= 0.0 && x < 1.0)) throw DataError("latent positions must lie in [0,1)");
}

GraphonStep initial_graphon(const Network& net, int K, RandomStream& rng) {
  const double rho = density(net);
  Matrix P(K, K);
  for (int k = 0; k < K; ++k)
    for (int l = k; l < K; ++l) {
      const double p = std::clamp(rho * (0.5 + rng.uniform()), kMinProb, kMaxProb);
      P(k, l) = p;
      P(l, k) = p;
    }
  return GraphonStep::from_pi(std::vector<double>(K, 1.0 / K), std::move(P));
}

std::vector<double> midpoints(const GraphonStep& g, const std::vector<int>& blocks) {
  std::vector<double> u(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) u[i] = g.midpoint(blocks[i]);
  return u;
}

BlockParams graphon_params(const GraphonStep& g) {
  BlockParams params;
  params.kind = ModelKind::kBernoulli;
  params.K = g.K();
  params.pi = g.pi();
  double total = 0.0;
  for (double p : params.pi) total += p;
  for (double& p : params.pi) p /= total;
  params.block_matrix = g.P;
  return params;
}

}  // namespace

int McemConfig::sweeps_at(int m) const {
  return std::min(sweeps_cap, sweeps_base + sweeps_increment * (m - 1));
}

double McemConfig::delta_at(int m) const {
  if (m >= em_max_iter) return 1.0;
  const int ramp = (em_max_iter + 1) / 2;
  return std::min(1.0, static_cast<double>(m) / ramp);
}

void McemConfig::validate() const {
  if (K < 1) throw UsageError("K must be at least 1");
  if (em_max_iter < 1 || sweeps_base < 1 || sweeps_increment < 0 || sweeps_cap < 1 || thinning < 1 ||
      restarts < 1 || final_sweeps < 1)
    throw UsageError("mcem schedules must be positive");
  if (!(burn_in >= 0.0)) throw UsageError("burn_in must be non-negative");
  if (thinning > std::min(sweeps_base, sweeps_cap))
    throw UsageError("thinning exceeds the number of kept sweeps");
}

double acceptance_prob(const Network& net, const LatentPositions& u, std::size_t j, double u_star,
                       const GraphonStep& g) {
  check_positions(net, u);
  if (j >= net.size()) throw DataError("node index out of range");
  if (!(u_star >= 0.0 && u_star < 1.0)) throw DataError("proposal must lie in [0,1)");
  const int current = g.interval_of(u.u[j]);
  const int target = g.interval_of(u_star);
  if (current == target) throw DataError("proposal lies inside the current interval");

  double log_num = 0.0;
  double log_den = 0.0;
  for (std::size_t l = 0; l < net.size(); ++l) {
    if (l == j) continue;
    const bool linked = net.value(j, l) != 0;
    const double p_new = graphon_eval(g, u_star, u.u[l]);
    const double p_old = graphon_eval(g, u.u[j], u.u[l]);
    log_num += std::log(linked ? p_new : 1.0 - p_new);
    log_den += std::log(linked ? p_old : 1.0 - p_old);
  }
  if (log_den == -std::numeric_limits<double>::infinity()) return 1.0;
  if (log_num == -std::numeric_limits<double>::infinity()) return 0.0;
  const double log_ratio =
      log_num - log_den + std::log(1.0 - g.width(current)) - std::log(1.0 - g.width(target));
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

LatentPositions gibbs_sweep(const Network& net, LatentPositions u, const GraphonStep& g,
                            RandomStream& rng) {
  check_network(net);
  check_positions(net, u);
  g.validate();
  GibbsChain chain(net, g, std::move(u.u));
  chain.sweep(rng);
  return {chain.u()};
}

LatentPositions posterior_mode(std::span<const LatentPositions> samples, const GraphonStep& g,
                               int thinning) {
  if (thinning < 1) throw DataError("thinning must be positive");
  if (samples.size() < static_cast<std::size_t>(thinning)) throw DataError("no thinned samples");
  const std::size_t n = samples.front().u.size();
  VisitCounter visits(n, g.K());
  std::vector<int> intervals(n);
  for (std::size_t t = thinning - 1; t < samples.size(); t += thinning) {
    if (samples[t].u.size() != n) throw DataError("samples differ in length");
    for (std::size_t i = 0; i < n; ++i) intervals[i] = g.interval_of(samples[t].u[i]);
    visits.add(intervals);
  }
  return {midpoints(g, visits.modes())};
}

GraphonStep graphon_m_step(const Network& net, const LatentPositions& u_hat, const GraphonStep& g,
                           double delta, int K) {
  check_positions(net, u_hat);
  if (!(delta >= 0.0 && delta <= 1.0)) throw DataError("delta must lie in [0,1]");
  if (g.K() != K) throw DataError("graphon K does not match");
  std::vector<int> blocks(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) blocks[i] = g.interval_of(u_hat.u[i]);
  Partition part(std::move(blocks), K);

  BlockParams mle = mle_block_params(net, part, ModelKind::kBernoulli, EmptyBlocks::kAllow);
  std::vector<double> pi(K);
  for (int k = 0; k < K; ++k) pi[k] = delta * mle.pi[k] + (1.0 - delta) / K;
  return GraphonStep::from_pi(pi, std::move(mle.block_matrix));
}

double gini_uncertainty(std::span<const double> freq) {
  const std::size_t K = freq.size();
  if (K == 0) throw DataError("empty frequency row");
  for (double f : freq)
    if (f < 0.0) throw DataError("negative frequency");
  if (K == 1) return 1.0;
  double diff = 0.0;
  for (double a : freq)
    for (double b : freq) diff += std::abs(a - b);
  const double raw = diff / (2.0 * static_cast<double>(K));
  const double normalizer = static_cast<double>(K - 1) / static_cast<double>(K);
  return std::clamp(raw / normalizer, 0.0, 1.0);
}

FitResult mcem_fit(const Network& net, const McemConfig& cfg) {
  check_network(net);
  cfg.validate();
  if (static_cast<std::size_t>(cfg.K) > net.size()) throw UsageError("K exceeds the number of nodes");
  const std::size_t n = net.size();
  const int K = cfg.K;

  struct Run {
    GraphonStep g;
    Partition part;
    double objective = 0.0;
    std::vector<double> trace;
    Matrix freq;
    std::vector<TraceRecord> latent;
    int iterations = 0;
  };
  std::vector<Run> runs(cfg.restarts);

  run_restarts(runs.size(), cfg.workers, [&](std::size_t r) {
    RandomStream rng(cfg.seed, r);
    GraphonStep g = initial_graphon(net, K, rng);
    std::vector<double> u(n);
    for (double& x : u) x = rng.uniform();

    Run run;
    std::vector<int> previous;
    int unchanged = 0;
    std::vector<int> blocks;
    for (int m = 1; m <= cfg.em_max_iter; ++m) {
      GibbsChain chain(net, g, std::move(u));
      const int kept = cfg.sweeps_at(m);
      const int burn = static_cast<int>(std::ceil(cfg.burn_in * kept));
      for (int s = 0; s < burn; ++s) chain.sweep(rng);
      VisitCounter visits(n, K);
      for (int s = 1; s <= kept; ++s) {
        chain.sweep(rng);
        if (s % cfg.thinning == 0) visits.add(chain.intervals());
      }
      blocks = visits.modes();
      unchanged = (blocks == previous) ? unchanged + 1 : 0;
      previous = blocks;
      const bool converged = unchanged >= 2;
      const double delta = converged ? 1.0 : cfg.delta_at(m);

      LatentPositions u_hat{midpoints(g, blocks)};
      g = graphon_m_step(net, u_hat, g, delta, K);
      run.iterations = m;
      run.trace.push_back(bernoulli_loglik(net, Partition(blocks, K), graphon_params(g)));
      // Re-seat every node at the centre of its block under the new boundaries.
      u = midpoints(g, blocks);
      if (converged) break;
    }

    GibbsChain chain(net, g, std::move(u));
    const int burn = static_cast<int>(std::ceil(cfg.burn_in * cfg.final_sweeps));
    for (int s = 0; s < burn; ++s) chain.sweep(rng);
    VisitCounter visits(n, K);
    for (int s = 0; s < cfg.final_sweeps; ++s) {
      chain.sweep(rng);
      visits.add(chain.intervals());
      if (cfg.record_trace)
        for (std::size_t i = 0; i < n; ++i)
          run.latent.push_back({static_cast<std::size_t>(s), i, chain.u()[i]});
    }
    run.freq = Matrix(n, K);
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < K; ++k) run.freq(i, k) = visits.count(i, k) / static_cast<double>(visits.samples());

    run.part = Partition(blocks, K);
    run.objective = bernoulli_loglik(net, run.part, graphon_params(g));
    run.g = std::move(g);
    runs[r] = std::move(run);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].objective > runs[best].objective) best = r;
  Run& run = runs[best];

  FitResult fit;
  fit.engine = "mcem";
  fit.model = ModelKind::kBernoulli;
  fit.K = K;
  fit.directed = false;
  fit.node_labels = net.labels();
  fit.partition = run.part;
  fit.params = graphon_params(run.g);
  fit.graphon = run.g;
  fit.objective = run.objective;
  fit.loglik = profile_loglik(net, fit.partition, ModelKind::kBernoulli);
  fit.objective_trace = run.trace;
  PosteriorSummary summary;
  summary.freq = run.freq;
  summary.gini.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(K);
    for (int k = 0; k < K; ++k) row[k] = run.freq(i, k);
    summary.gini[i] = gini_uncertainty(row);
  }
  fit.posterior = std::move(summary);
  fit.best_restart = best;
  fit.latent_trace = std::move(run.latent);
  fit.config = {{"K", K},
                {"em_max_iter", cfg.em_max_iter},
                {"sweeps_base", cfg.sweeps_base},
                {"sweeps_increment", cfg.sweeps_increment},
                {"sweeps_cap", cfg.sweeps_cap},
                {"thinning", cfg.thinning},
                {"burn_in", cfg.burn_in},
                {"restarts", cfg.restarts},
                {"final_sweeps", cfg.final_sweeps},
                {"seed", cfg.seed},
                {"method", "mcem"},
                {"model", "bernoulli"},
                {"iterations", run.iterations}};
  return fit;
}

}  // namespace sbm
