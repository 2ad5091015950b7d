#include "sbm/cli.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sbm/errors.h"
#include "sbm/eval.h"
#include "sbm/generate.h"
#include "sbm/graph.h"
#include "sbm/mcem.h"
#include "sbm/vem.h"
#include "sbm/vertex_switch.h"

namespace sbm {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

std::string read_all(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw UsageError(flag + ": cannot parse '" + item + "' as a number");
    values.push_back(v);
  }
  if (values.empty()) throw UsageError(flag + " needs at least one value");
  return values;
}

Matrix parse_matrix(const std::string& text, int K) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_list(row, "--block-matrix"));
  if (rows.size() != static_cast<std::size_t>(K)) throw UsageError("--block-matrix must have K rows");
  Matrix m(K, K);
  for (int k = 0; k < K; ++k) {
    if (rows[k].size() != static_cast<std::size_t>(K)) throw UsageError("--block-matrix rows must have K entries");
    for (int l = 0; l < K; ++l) m(k, l) = rows[k][l];
  }
  return m;
}

void check_method(ModelKind model, const std::string& method) {
  if (method == "switch") return;
  if (method == "vem") {
    if (model == ModelKind::kDcPoisson) throw UsageError("vem supports the bernoulli and poisson models");
    return;
  }
  if (method == "mcem") {
    if (model != ModelKind::kBernoulli) throw UsageError("mcem supports the bernoulli model only");
    return;
  }
  throw UsageError("unknown method '" + method + "' (expected vem, switch or mcem)");
}

Network load_network(const FitOptions& opts, ModelKind model) {
  std::ifstream in = open_input(opts.input);
  if (opts.bins > 0) return discretize_weights(load_weighted_edge_list(in, opts.directed), opts.bins);
  return load_edge_list(in, opts.directed, model == ModelKind::kBernoulli ? ValueKind::kBinary : ValueKind::kCount);
}

void write_trace(const std::string& path, const std::vector<TraceRecord>& trace,
                 const std::vector<std::string>& labels) {
  std::ofstream out = open_output(path);
  out << "sweep,node,u\n";
  char buf[32];
  for (const TraceRecord& r : trace) {
    std::snprintf(buf, sizeof buf, "%.17g", r.u);
    out << r.sweep << ',' << labels[r.node] << ',' << buf << '\n';
  }
}

// Node ids paired with group names, in file order.
struct Labelling {
  std::vector<std::string> nodes;
  std::vector<std::string> groups;
  const PosteriorSummary* posterior = nullptr;
  int K = 0;  // blocks of a fit file; 0 for label files
};

Labelling from_label_file(const std::string& path) {
  std::ifstream in = open_input(path);
  Labelling result;
  for (auto& [node, group] : read_label_file(in)) {
    result.nodes.push_back(std::move(node));
    result.groups.push_back(std::move(group));
  }
  return result;
}

bool looks_like_json(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  return first != std::string::npos && text[first] == '{';
}

// Dense codes for group names in first-appearance order.
std::pair<std::vector<int>, std::vector<std::string>> encode(const std::vector<std::string>& groups) {
  std::map<std::string, int> code;
  std::vector<std::string> names;
  std::vector<int> labels;
  for (const auto& g : groups) {
    auto [it, inserted] = code.emplace(g, static_cast<int>(names.size()));
    if (inserted) names.push_back(g);
    labels.push_back(it->second);
  }
  return {labels, names};
}

std::map<std::string, std::size_t> index_nodes(const std::vector<std::string>& nodes, const std::string& what) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!index.emplace(nodes[i], i).second) throw DataError("node '" + nodes[i] + "' appears twice in " + what);
  return index;
}

std::size_t parse_workers() {
  const char* env = std::getenv("SBM_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw UsageError("SBM_WORKERS must be a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

void cmd_stats(const StatsOptions& opts, std::ostream& out) {
  std::ifstream in = open_input(opts.input);
  const Network net = load_edge_list(in, opts.directed, opts.counts ? ValueKind::kCount : ValueKind::kBinary);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", density(net));
  out << "nodes: " << net.size() << '\n'
      << "edges: " << net.num_edges() << '\n'
      << "density: " << buf << '\n';
}

FitResult cmd_fit(const FitOptions& opts) {
  const ModelKind model = parse_model_kind(opts.model);
  check_method(model, opts.method);
  if (opts.K < 1) throw UsageError("K must be at least 1");
  if (opts.restarts && *opts.restarts < 1) throw UsageError("restarts must be at least 1");
  if (opts.bins < 0) throw UsageError("bins must be positive");
  if (!opts.trace.empty() && opts.method != "mcem") throw UsageError("--trace is only available for mcem");
  if (opts.method == "mcem" && opts.directed) throw UsageError("mcem needs an undirected network");
  if (opts.greedy && opts.method != "switch") throw UsageError("--greedy is only available for switch");

  const Network net = load_network(opts, model);
  if (static_cast<std::size_t>(opts.K) > net.size()) throw UsageError("K exceeds the number of nodes");

  FitResult fit;
  if (opts.method == "vem") {
    VemConfig cfg;
    cfg.K = opts.K;
    cfg.restarts = opts.restarts.value_or(cfg.restarts);
    cfg.seed = opts.seed;
    cfg.workers = opts.workers;
    fit = vem_fit(net, cfg, model);
  } else if (opts.method == "switch") {
    SwitchConfig cfg;
    cfg.K = opts.K;
    cfg.restarts = opts.restarts.value_or(cfg.restarts);
    cfg.seed = opts.seed;
    cfg.kind = model;
    cfg.greedy = opts.greedy;
    cfg.workers = opts.workers;
    fit = switch_fit(net, cfg);
  } else {
    McemConfig cfg;
    cfg.K = opts.K;
    cfg.restarts = opts.restarts.value_or(cfg.restarts);
    cfg.seed = opts.seed;
    cfg.workers = opts.workers;
    cfg.record_trace = !opts.trace.empty();
    fit = mcem_fit(net, cfg);
  }
  fit.config["directed"] = opts.directed;
  fit.config["bins"] = opts.bins;

  if (!opts.out.empty()) {
    std::ofstream out = open_output(opts.out);
    out << serialize_fit(fit);
  }
  if (!opts.trace.empty()) write_trace(opts.trace, fit.latent_trace, fit.node_labels);
  return fit;
}

void cmd_generate(const GenerateOptions& opts) {
  if (opts.K < 1) throw UsageError("K must be at least 1");
  if (opts.n < 2) throw UsageError("n must be at least 2");
  if (opts.out_prefix.empty()) throw UsageError("--out-prefix is required");
  GenConfig cfg;
  cfg.n = opts.n;
  cfg.directed = opts.directed;
  cfg.seed = opts.seed;
  cfg.params.kind = parse_model_kind(opts.model);
  cfg.params.K = opts.K;
  cfg.params.pi = parse_list(opts.pi, "--pi");
  if (cfg.params.pi.size() != static_cast<std::size_t>(opts.K)) throw UsageError("--pi must have K entries");
  cfg.params.block_matrix = parse_matrix(opts.block_matrix, opts.K);
  if (cfg.params.kind == ModelKind::kDcPoisson) {
    cfg.params.gamma = opts.gamma.empty() ? std::vector<double>(opts.n, 0.0) : parse_list(opts.gamma, "--gamma");
    if (cfg.params.gamma->size() != opts.n) throw UsageError("--gamma must have n entries");
  } else if (!opts.gamma.empty()) {
    throw UsageError("--gamma is only valid for dc_poisson");
  }
  try {
    cfg.params.validate(opts.directed);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }

  const auto [net, truth] = sample_sbm(cfg);
  {
    std::ofstream out = open_output(opts.out_prefix + ".edges");
    write_edge_list(out, net);
  }
  std::ofstream labels = open_output(opts.out_prefix + ".labels");
  for (std::size_t i = 0; i < net.size(); ++i) labels << net.label(i) << ' ' << truth[i] + 1 << '\n';
}

void cmd_eval(const EvalOptions& opts, std::ostream& out) {
  const std::string text = read_all(opts.fit);
  Labelling pred;
  FitResult fit;
  if (looks_like_json(text)) {
    fit = parse_fit(text);
    pred.nodes = fit.node_labels;
    for (int z : fit.partition.labels()) pred.groups.push_back(std::to_string(z + 1));
    pred.K = fit.K;
    if (fit.posterior) pred.posterior = &*fit.posterior;
  } else {
    pred = from_label_file(opts.fit);
  }
  const Labelling truth = from_label_file(opts.truth);

  const auto pred_index = index_nodes(pred.nodes, "the fit");
  const auto truth_index = index_nodes(truth.nodes, "the truth labels");
  for (const auto& node : pred.nodes)
    if (!truth_index.count(node)) throw DataError("node '" + node + "' is missing from the truth labels");
  for (const auto& node : truth.nodes)
    if (!pred_index.count(node)) throw DataError("node '" + node + "' is missing from the fit");
  if (pred.nodes.empty()) throw DataError("no nodes to compare");

  std::vector<std::string> aligned_truth;
  for (const auto& node : pred.nodes) aligned_truth.push_back(truth.groups[truth_index.at(node)]);

  std::vector<std::string> pred_names;
  std::vector<int> pred_codes;
  if (pred.K > 0) {
    for (int k = 0; k < pred.K; ++k) pred_names.push_back(std::to_string(k + 1));
    for (const auto& g : pred.groups) pred_codes.push_back(std::stoi(g) - 1);
  } else {
    std::tie(pred_codes, pred_names) = encode(pred.groups);
  }
  auto [truth_codes, truth_names] = encode(aligned_truth);
  const Partition a(pred_codes, static_cast<int>(pred_names.size()));
  const Partition b(truth_codes, static_cast<int>(truth_names.size()));
  const PartitionComparison cmp = rand_index(a, b);

  char buf[64];
  out << "nodes: " << pred.nodes.size() << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", cmp.rand_index);
  out << "rand_index: " << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", cmp.adjusted_rand);
  out << "adjusted_rand: " << buf << '\n';

  out << "confusion (rows: fit blocks, columns: truth groups)\n";
  std::size_t width = 6;
  for (const auto& s : pred_names) width = std::max(width, s.size() + 2);
  for (const auto& s : truth_names) width = std::max(width, s.size() + 2);
  out << std::setw(static_cast<int>(width)) << "";
  for (const auto& s : truth_names) out << std::setw(static_cast<int>(width)) << s;
  out << '\n';
  for (std::size_t k = 0; k < pred_names.size(); ++k) {
    out << std::setw(static_cast<int>(width)) << pred_names[k];
    for (std::size_t l = 0; l < truth_names.size(); ++l)
      out << std::setw(static_cast<int>(width)) << cmp.confusion[k][l];
    out << '\n';
  }

  if (pred.posterior && opts.top > 0) {
    const PosteriorSummary& post = *pred.posterior;
    // Scores come from the frequency rows, not the stored gini column.
    std::vector<double> gini(post.freq.rows());
    std::vector<double> row(post.freq.cols());
    for (std::size_t i = 0; i < gini.size(); ++i) {
      for (std::size_t k = 0; k < row.size(); ++k) row[k] = post.freq(i, k);
      gini[i] = gini_uncertainty(row);
    }
    const auto worst = lowest_scoring_nodes(gini, opts.top);
    out << "lowest gini nodes\n";
    out << "node";
    for (std::size_t k = 0; k < post.freq.cols(); ++k) out << " block_" << k + 1;
    out << " gini\n";
    for (std::size_t i : worst) {
      out << pred.nodes[i];
      for (std::size_t k = 0; k < post.freq.cols(); ++k) {
        std::snprintf(buf, sizeof buf, " %.4f", post.freq(i, k));
        out << buf;
      }
      std::snprintf(buf, sizeof buf, " %.4f", gini[i]);
      out << buf << '\n';
    }
  }
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic blockmodel fitting and evaluation"};
  app.require_subcommand(1);

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Print node count, edge count and density");
  stats_cmd->add_option("input", stats.input, "Edge list")->required();
  stats_cmd->add_flag("--directed", stats.directed, "Treat edges as directed");
  stats_cmd->add_flag("--counts", stats.counts, "Edge values are counts");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a blockmodel");
  fit_cmd->add_option("input", fit.input, "Edge list")->required();
  fit_cmd->add_option("--model", fit.model, "bernoulli, poisson or dc_poisson")->capture_default_str();
  fit_cmd->add_option("--method", fit.method, "vem, switch or mcem")->capture_default_str();
  fit_cmd->add_option("--K", fit.K, "Number of blocks")->capture_default_str();
  fit_cmd->add_option("--restarts", fit.restarts, "Random restarts (engine default when omitted)");
  fit_cmd->add_option("--seed", fit.seed, "Random seed")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Output fit file (stdout when omitted)");
  fit_cmd->add_flag("--directed", fit.directed, "Treat edges as directed");
  fit_cmd->add_option("--bins", fit.bins,
                      "Read real weights in [0,1] and bin them as floor(w * bins), with w = 1 in the top bin");
  fit_cmd->add_flag("--greedy", fit.greedy, "Greedy single-vertex moves instead of Kernighan-Lin passes");
  fit_cmd->add_option("--trace", fit.trace, "Write the final mcem chain's latent positions as CSV");

  GenerateOptions gen;
  auto* gen_cmd = app.add_subcommand("generate", "Sample a network from a blockmodel");
  gen_cmd->add_option("--n", gen.n, "Number of nodes")->required();
  gen_cmd->add_option("--K", gen.K, "Number of blocks")->required();
  gen_cmd->add_option("--pi", gen.pi, "Block proportions, comma separated")->required();
  gen_cmd->add_option("--block-matrix", gen.block_matrix,
                      "K x K matrix, rows separated by ';' (probabilities for bernoulli, log-rates otherwise)")
      ->required();
  gen_cmd->add_option("--model", gen.model, "bernoulli, poisson or dc_poisson")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out-prefix", gen.out_prefix, "Writes <prefix>.edges and <prefix>.labels")->required();
  gen_cmd->add_flag("--directed", gen.directed, "Sample a directed network");
  gen_cmd->add_option("--gamma", gen.gamma, "dc_poisson node effects, comma separated (default 0)");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Compare a fit or label file with truth labels");
  eval_cmd->add_option("fit", eval.fit, "Fit file or label file")->required();
  eval_cmd->add_option("truth", eval.truth, "Truth label file")->required();
  eval_cmd->add_option("--top", eval.top, "Lowest-Gini nodes to report")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*stats_cmd) {
      cmd_stats(stats, out);
    } else if (*fit_cmd) {
      fit.workers = parse_workers();
      const FitResult result = cmd_fit(fit);
      if (fit.out.empty()) out << serialize_fit(result);
    } else if (*gen_cmd) {
      cmd_generate(gen);
    } else if (*eval_cmd) {
      cmd_eval(eval, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sbm
