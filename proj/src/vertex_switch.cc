#include "sbm/vertex_switch.h"

#include <tuple>
#include <utility>

#include "sbm/block_stats.h"
#include "sbm/errors.h"
#include "sbm/parallel.h"
#include "sbm/random.h"

namespace sbm {

namespace {

// Improvements at or below this are treated as ties.
constexpr double kImprovementTol = 1e-10;

struct BestMove {
  int block = -1;
  double delta = 0.0;
};

BestMove best_move(BlockStats& stats, std::size_t v) {
  BestMove best;
  const int current = stats.partition()[v];
  for (int k = 0; k < stats.K(); ++k) {
    if (k == current) continue;
    const double d = stats.move_delta(v, k).value;
    if (best.block < 0 || d > best.delta) best = {k, d};
  }
  return best;
}

// One Kernighan-Lin pass from the state held in `stats`. Returns the best
// state seen (the start state when nothing beat it) and its objective.
std::pair<Partition, double> kl_pass(BlockStats& stats, double objective) {
  const std::size_t n = stats.partition().size();
  Partition best_state = stats.partition();
  double best_objective = objective;
  double running = objective;
  for (std::size_t v = 0; v < n; ++v) {
    BestMove move = best_move(stats, v);
    stats.move(v, move.block);
    running += move.delta;
    if (running > best_objective + kImprovementTol) {
      best_objective = running;
      best_state = stats.partition();
    }
  }
  return {std::move(best_state), best_objective};
}

std::pair<Partition, double> greedy_pass(BlockStats& stats, double objective) {
  for (std::size_t v = 0; v < stats.partition().size(); ++v) {
    BestMove move = best_move(stats, v);
    if (move.delta > kImprovementTol) {
      stats.move(v, move.block);
      objective += move.delta;
    }
  }
  return {stats.partition(), objective};
}

}  // namespace

MoveDelta delta_loglik(const Network& net, const Partition& part, std::size_t vertex, int to,
                       ModelKind kind) {
  if (vertex >= net.size()) throw DataError("vertex out of range");
  if (part[vertex] == to) throw DataError("destination equals the current block");
  if (kind == ModelKind::kBernoulli && !net.is_binary()) throw DataError("bernoulli model needs a binary network");
  BlockStats stats(net, part, kind);
  auto d = stats.move_delta(vertex, to);
  return {d.value, d.empties_block};
}

FitResult switch_fit(const Network& net, const SwitchConfig& cfg) {
  if (cfg.K < 1) throw UsageError("K must be at least 1");
  if (static_cast<std::size_t>(cfg.K) > net.size()) throw UsageError("K exceeds the number of nodes");
  if (cfg.restarts < 1) throw UsageError("restarts must be at least 1");
  if (cfg.kind == ModelKind::kBernoulli && !net.is_binary())
    throw DataError("bernoulli model needs a binary network");

  const std::size_t n = net.size();
  struct Run {
    Partition part;
    double objective = 0.0;
    std::vector<double> trace;
  };
  std::vector<Run> runs(cfg.K == 1 ? 1 : cfg.restarts);

  run_restarts(runs.size(), cfg.workers, [&](std::size_t r) {
    std::vector<int> labels(n, 0);
    if (cfg.K > 1) {
      RandomStream rng(cfg.seed, r);
      for (int& z : labels) z = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(cfg.K));
    }
    Partition start(std::move(labels), cfg.K);
    if (cfg.K == 1) {
      const double obj = profile_loglik(net, start, cfg.kind);
      runs[r] = {std::move(start), obj, {obj}};
      return;
    }
    double objective = profile_loglik(net, start, cfg.kind);
    std::vector<double> trace{objective};
    Partition current = std::move(start);
    for (int pass = 0; pass < cfg.max_passes; ++pass) {
      BlockStats stats(net, current, cfg.kind);
      auto [candidate, estimate] = cfg.greedy ? greedy_pass(stats, objective) : kl_pass(stats, objective);
      if (!cfg.greedy && !(estimate > objective + kImprovementTol)) {
        // Forced moves of earlier vertices can hide a single improving
        // move; a greedy pass finds it, so the result is 1-move optimal.
        BlockStats fresh(net, current, cfg.kind);
        std::tie(candidate, estimate) = greedy_pass(fresh, objective);
      }
      if (!(estimate > objective + kImprovementTol)) break;
      // Recompute from scratch so rounding in the running sum never accumulates.
      objective = profile_loglik(net, candidate, cfg.kind);
      current = std::move(candidate);
      trace.push_back(objective);
    }
    runs[r] = {std::move(current), objective, std::move(trace)};
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].objective > runs[best].objective) best = r;

  FitResult fit;
  fit.engine = "switch";
  fit.model = cfg.kind;
  fit.K = cfg.K;
  fit.directed = net.directed();
  fit.node_labels = net.labels();
  fit.partition = runs[best].part;
  fit.params = mle_block_params(net, fit.partition, cfg.kind, EmptyBlocks::kAllow);
  fit.objective = runs[best].objective;
  fit.loglik = runs[best].objective;
  fit.objective_trace = runs[best].trace;
  fit.best_restart = best;
  fit.config = {{"K", cfg.K},
                {"restarts", cfg.restarts},
                {"max_passes", cfg.max_passes},
                {"seed", cfg.seed},
                {"greedy", cfg.greedy},
                {"method", "switch"},
                {"model", to_string(cfg.kind)}};
  return fit;
}

}  // namespace sbm
