#include "sbm/generate.h"

#include <cmath>

#include "sbm/errors.h"
#include "sbm/random.h"

namespace sbm {

std::pair<Network, Partition> sample_sbm(const GenConfig& cfg) {
  if (cfg.n < 2) throw DataError("generator needs n >= 2");
  const BlockParams& params = cfg.params;
  params.validate(cfg.directed);
  if (params.kind == ModelKind::kDcPoisson && params.gamma->size() != cfg.n)
    throw DataError("gamma must have n entries");

  const std::size_t n = cfg.n;
  RandomStream label_rng(cfg.seed, 0);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = sample_categorical(label_rng, params.pi);
  Partition part(std::move(labels), params.K);

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = cfg.directed ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      RandomStream rng(cfg.seed, 1 + i * n + j);
      const double cell = params.block_matrix(part[i], part[j]);
      std::int64_t value = 0;
      switch (params.kind) {
        case ModelKind::kBernoulli:
          value = rng.uniform() < cell ? 1 : 0;
          break;
        case ModelKind::kPoisson:
          value = sample_poisson(rng, std::exp(cell));
          break;
        case ModelKind::kDcPoisson:
          value = sample_poisson(rng, std::exp((*params.gamma)[i] + (*params.gamma)[j] + cell));
          break;
      }
      if (value > 0) edges.push_back({i, j, value});
    }
  }
  ValueKind kind = params.kind == ModelKind::kBernoulli ? ValueKind::kBinary : ValueKind::kCount;
  return {Network(n, cfg.directed, kind, std::move(edges)), std::move(part)};
}

}  // namespace sbm
