#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sbm/matrix.h"
#include "sbm/models.h"

namespace sbm {

inline constexpr int kFitSchemaVersion = 1;

// Block-assignment frequencies from the final Gibbs chain.
struct PosteriorSummary {
  Matrix freq;               // n x K, rows sum to 1
  std::vector<double> gini;  // normalized Gini per node, 1 = certain
};

struct TraceRecord {
  std::size_t sweep = 0;
  std::size_t node = 0;
  double u = 0.0;
};

struct FitResult {
  std::string engine;  // "vem", "switch" or "mcem"
  ModelKind model = ModelKind::kBernoulli;
  int K = 1;
  bool directed = false;
  std::vector<std::string> node_labels;
  Partition partition;
  BlockParams params;
  std::optional<GraphonStep> graphon;  // mcem only
  // Engine criterion: ELBO (vem), profile log-likelihood (switch),
  // bernoulli log-likelihood of the mode partition (mcem).
  double objective = 0.0;
  // profile_loglik of the reported partition.
  double loglik = 0.0;
  std::vector<double> objective_trace;
  std::optional<PosteriorSummary> posterior;
  std::size_t best_restart = 0;
  nlohmann::json config;
  // Latent positions of the final chain (mcem with tracing on); written
  // to a separate trace file, not to the fit JSON.
  std::vector<TraceRecord> latent_trace;
};

// JSON text with sorted keys, two-space indentation and doubles printed
// with 17 significant digits; non-finite doubles become "inf", "-inf", "nan".
std::string serialize_fit(const FitResult& fit);
FitResult parse_fit(const std::string& text);

// Same number formatting rules, for any JSON value.
std::string dump_json(const nlohmann::json& value);

}  // namespace sbm
