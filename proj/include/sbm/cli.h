#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "sbm/fit_result.h"

namespace sbm {

struct StatsOptions {
  std::string input;
  bool directed = false;
  bool counts = false;
};

struct FitOptions {
  std::string input;
  std::string model = "bernoulli";
  std::string method = "switch";
  int K = 2;
  std::optional<int> restarts;  // engine default when unset
  std::uint64_t seed = 0;
  std::string out;
  bool directed = false;
  // Positive: input carries real weights in [0,1], discretized into this many bins.
  int bins = 0;
  bool greedy = false;
  std::string trace;  // mcem latent-position trace file, empty for none
  std::size_t workers = 1;
};

struct GenerateOptions {
  std::size_t n = 0;
  int K = 0;
  std::string pi;            // "0.5,0.5"
  std::string block_matrix;  // rows separated by ';', entries by ','
  std::string model = "bernoulli";
  std::uint64_t seed = 0;
  std::string out_prefix;
  bool directed = false;
  std::string gamma;  // dc_poisson node effects, one per node
};

struct EvalOptions {
  std::string fit;    // fit JSON or label file
  std::string truth;  // label file
  std::size_t top = 3;
};

// Prints node, edge and density lines.
void cmd_stats(const StatsOptions& opts, std::ostream& out);

// Fits, writes the JSON result to opts.out (when set) and returns it.
FitResult cmd_fit(const FitOptions& opts);

// Writes <prefix>.edges and <prefix>.labels; labels are 1-based blocks.
void cmd_generate(const GenerateOptions& opts);

// Rand comparison against the truth labels, plus the lowest-Gini nodes
// when the fit carries a posterior summary.
void cmd_eval(const EvalOptions& opts, std::ostream& out);

// Argument parsing and dispatch. Returns 0 on success, 1 on data errors
// and 2 on usage errors. The worker count comes from SBM_WORKERS.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sbm
