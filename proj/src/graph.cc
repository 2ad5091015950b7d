#include "sbm/graph.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "sbm/errors.h"

namespace sbm {

namespace {

std::string line_prefix(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

bool is_comment_or_blank(const std::vector<std::string>& tokens) {
  return tokens.empty() || tokens.front().front() == '#';
}

// Shared bookkeeping for the two edge-list readers.
class LabelTable {
 public:
  std::size_t intern(const std::string& label) {
    auto [it, inserted] = index_.try_emplace(label, labels_.size());
    if (inserted) labels_.push_back(label);
    return it->second;
  }
  std::size_t size() const { return labels_.size(); }
  std::vector<std::string> take() { return std::move(labels_); }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::string> labels_;
};

std::pair<std::size_t, std::size_t> pair_key(std::size_t a, std::size_t b, bool directed) {
  if (!directed && b < a) std::swap(a, b);
  return {a, b};
}

void build_adjacency(std::size_t n, const std::vector<Edge>& edges, bool by_src,
                     std::vector<std::size_t>& offset, std::vector<Neighbor>& adj,
                     bool mirror) {
  std::vector<std::size_t> count(n + 1, 0);
  for (const Edge& e : edges) {
    ++count[by_src ? e.src : e.dst];
    if (mirror) ++count[e.dst];
  }
  offset.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offset[i + 1] = offset[i] + count[i];
  adj.assign(offset[n], Neighbor{});
  std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
  for (const Edge& e : edges) {
    if (by_src) {
      adj[fill[e.src]++] = {e.dst, e.value};
    } else {
      adj[fill[e.dst]++] = {e.src, e.value};
    }
    if (mirror) adj[fill[e.dst]++] = {e.src, e.value};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj.begin() + offset[i], adj.begin() + offset[i + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
}

}  // namespace

Network::Network(std::size_t n_nodes, bool directed, ValueKind kind,
                 std::vector<Edge> edges, std::vector<std::string> labels)
    : n_(n_nodes), directed_(directed), kind_(kind), labels_(std::move(labels)) {
  if (labels_.empty()) {
    labels_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) labels_.push_back(std::to_string(i));
  }
  if (labels_.size() != n_) throw DataError("label count does not match node count");
  for (std::size_t i = 0; i < n_; ++i) {
    if (!index_.emplace(labels_[i], i).second)
      throw DataError("duplicate node label '" + labels_[i] + "'");
  }

  std::vector<Edge> kept;
  kept.reserve(edges.size());
  for (Edge e : edges) {
    if (e.src >= n_ || e.dst >= n_) throw DataError("edge endpoint out of range");
    if (e.src == e.dst) throw DataError("self-loop on node '" + labels_[e.src] + "'");
    if (e.value < 0) throw DataError("negative edge value");
    if (e.value == 0) continue;
    if (kind_ == ValueKind::kBinary && e.value != 1)
      throw DataError("binary network with edge value " + std::to_string(e.value));
    if (!directed_ && e.dst < e.src) std::swap(e.src, e.dst);
    kept.push_back(e);
  }
  std::sort(kept.begin(), kept.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  for (std::size_t i = 1; i < kept.size(); ++i) {
    if (kept[i].src == kept[i - 1].src && kept[i].dst == kept[i - 1].dst)
      throw DataError("duplicate edge " + labels_[kept[i].src] + " " + labels_[kept[i].dst]);
  }
  num_edges_ = kept.size();
  total_value_ = 0;
  for (const Edge& e : kept) total_value_ += e.value;

  build_adjacency(n_, kept, true, out_offset_, out_, !directed_);
  if (directed_) build_adjacency(n_, kept, false, in_offset_, in_, false);
}

std::int64_t Network::value(std::size_t i, std::size_t j) const {
  auto row = out_neighbors(i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Neighbor& nb, std::size_t key) { return nb.node < key; });
  return (it != row.end() && it->node == j) ? it->value : 0;
}

std::vector<Edge> Network::edges() const {
  std::vector<Edge> result;
  result.reserve(num_edges_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (const Neighbor& nb : out_neighbors(i)) {
      if (directed_ || i < nb.node) result.push_back({i, nb.node, nb.value});
    }
  }
  return result;
}

std::size_t Network::index_of(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? n_ : it->second;
}

bool operator==(const Network& a, const Network& b) {
  if (a.n_ != b.n_ || a.directed_ != b.directed_ || a.kind_ != b.kind_ ||
      a.labels_ != b.labels_ || a.num_edges_ != b.num_edges_)
    return false;
  auto ea = a.edges();
  auto eb = b.edges();
  return std::equal(ea.begin(), ea.end(), eb.begin(), eb.end(), [](const Edge& x, const Edge& y) {
    return x.src == y.src && x.dst == y.dst && x.value == y.value;
  });
}

Network load_edge_list(std::istream& in, bool directed, ValueKind kind) {
  LabelTable table;
  std::map<std::pair<std::size_t, std::size_t>, std::int64_t> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (is_comment_or_blank(tokens)) continue;
    if (tokens.size() > 3) throw DataError(line_prefix(line_no) + "expected 'src dst [value]'");
    if (tokens.size() == 1) {
      table.intern(tokens[0]);
      continue;
    }
    if (tokens[0] == tokens[1]) throw DataError(line_prefix(line_no) + "self-loop on '" + tokens[0] + "'");
    std::int64_t value = 1;
    if (tokens.size() == 3) {
      const std::string& tok = tokens[2];
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw DataError(line_prefix(line_no) + "non-numeric value '" + tok + "'");
      if (value < 0) throw DataError(line_prefix(line_no) + "negative value " + tok);
      if (kind == ValueKind::kBinary && value > 1)
        throw DataError(line_prefix(line_no) + "value " + tok + " in binary mode");
    }
    const std::size_t src = table.intern(tokens[0]);
    const std::size_t dst = table.intern(tokens[1]);
    auto key = pair_key(src, dst, directed);
    auto [it, inserted] = entries.try_emplace(key, 0);
    if (!inserted && kind == ValueKind::kBinary)
      throw DataError(line_prefix(line_no) + "duplicate edge " + tokens[0] + " " + tokens[1]);
    it->second += value;
  }
  if (table.size() == 0) throw DataError("no edges");
  std::vector<Edge> edges;
  edges.reserve(entries.size());
  for (const auto& [key, value] : entries) edges.push_back({key.first, key.second, value});
  const std::size_t n = table.size();
  return Network(n, directed, kind, std::move(edges), table.take());
}

void write_edge_list(std::ostream& out, const Network& net) {
  out << "# nodes " << net.size() << (net.directed() ? " directed" : " undirected") << '\n';
  for (std::size_t i = 0; i < net.size(); ++i) out << net.label(i) << '\n';
  out << "# edges " << net.num_edges() << '\n';
  for (const Edge& e : net.edges()) {
    out << net.label(e.src) << ' ' << net.label(e.dst);
    if (!net.is_binary()) out << ' ' << e.value;
    out << '\n';
  }
}

double density(const Network& net) {
  if (net.size() < 2) throw DataError("density needs at least two nodes");
  return static_cast<double>(net.num_edges()) / net.num_pairs();
}

DegreeVector degrees(const Network& net) {
  DegreeVector d(net.size(), 0);
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (const Neighbor& nb : net.out_neighbors(i)) d[i] += nb.value;
    if (net.directed())
      for (const Neighbor& nb : net.in_neighbors(i)) d[i] += nb.value;
  }
  return d;
}

WeightedPairs load_weighted_edge_list(std::istream& in, bool directed) {
  LabelTable table;
  WeightedPairs result;
  result.directed = directed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (is_comment_or_blank(tokens)) continue;
    if (tokens.size() == 1) {
      table.intern(tokens[0]);
      continue;
    }
    if (tokens.size() != 3) throw DataError(line_prefix(line_no) + "expected 'src dst weight'");
    if (tokens[0] == tokens[1]) throw DataError(line_prefix(line_no) + "self-loop on '" + tokens[0] + "'");
    double w = 0.0;
    const std::string& tok = tokens[2];
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(w))
      throw DataError(line_prefix(line_no) + "non-numeric weight '" + tok + "'");
    if (w < 0.0 || w > 1.0) throw DataError(line_prefix(line_no) + "weight " + tok + " outside [0,1]");
    const std::size_t src = table.intern(tokens[0]);
    const std::size_t dst = table.intern(tokens[1]);
    if (!result.weights.emplace(pair_key(src, dst, directed), w).second)
      throw DataError(line_prefix(line_no) + "duplicate pair " + tokens[0] + " " + tokens[1]);
  }
  if (table.size() == 0) throw DataError("no edges");
  result.n_nodes = table.size();
  result.labels = table.take();
  return result;
}

Network discretize_weights(const WeightedPairs& weights, int n_bins) {
  if (n_bins < 1) throw DataError("n_bins must be positive");
  std::vector<Edge> edges;
  for (const auto& [key, w] : weights.weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw DataError("weight outside [0,1]");
    auto bin = static_cast<std::int64_t>(std::floor(w * n_bins));
    bin = std::min<std::int64_t>(bin, n_bins);
    if (bin > 0) edges.push_back({key.first, key.second, bin});
  }
  return Network(weights.n_nodes, weights.directed, ValueKind::kCount, std::move(edges),
                 weights.labels);
}

std::vector<std::pair<std::string, std::string>> read_label_file(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (is_comment_or_blank(tokens)) continue;
    if (tokens.size() != 2) throw DataError(line_prefix(line_no) + "expected 'node_id group_label'");
    rows.emplace_back(tokens[0], tokens[1]);
  }
  return rows;
}

}  // namespace sbm
