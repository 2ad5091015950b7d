#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sbm {

enum class ValueKind { kBinary, kCount };

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::int64_t value = 1;
};

struct Neighbor {
  std::size_t node = 0;
  std::int64_t value = 0;
};

// Immutable sparse network without self-loops. Absent pairs are zero.
//
// Undirected networks store every edge in both orientations, so
// out_neighbors(i) and in_neighbors(i) coincide. Node labels are the
// external identifiers; index i corresponds to labels()[i].
class Network {
 public:
  Network() = default;

  // `edges` holds each logical edge once: for undirected networks either
  // orientation may be given, but an unordered pair may appear only once.
  // Zero-valued edges are dropped. Throws DataError on self-loops, negative
  // values, non-unit binary values, duplicates or out-of-range endpoints.
  Network(std::size_t n_nodes, bool directed, ValueKind kind,
          std::vector<Edge> edges, std::vector<std::string> labels = {});

  std::size_t size() const { return n_; }
  bool directed() const { return directed_; }
  ValueKind value_kind() const { return kind_; }
  bool is_binary() const { return kind_ == ValueKind::kBinary; }

  // y_ij; zero if absent.
  std::int64_t value(std::size_t i, std::size_t j) const;

  // Sorted by neighbour index.
  std::span<const Neighbor> out_neighbors(std::size_t i) const {
    return {out_.data() + out_offset_[i], out_.data() + out_offset_[i + 1]};
  }
  std::span<const Neighbor> in_neighbors(std::size_t i) const {
    if (!directed_) return out_neighbors(i);
    return {in_.data() + in_offset_[i], in_.data() + in_offset_[i + 1]};
  }

  // Number of present pairs (unordered when undirected).
  std::size_t num_edges() const { return num_edges_; }
  // Sum of values over present pairs (unordered when undirected).
  std::int64_t total_value() const { return total_value_; }
  // Number of pairs that could carry an edge.
  double num_pairs() const {
    const double n = static_cast<double>(n_);
    return directed_ ? n * (n - 1.0) : n * (n - 1.0) / 2.0;
  }

  // Logical edges; one entry per unordered pair (src < dst) when undirected.
  std::vector<Edge> edges() const;

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  // Index of an external identifier, or size() when unknown.
  std::size_t index_of(const std::string& label) const;

  friend bool operator==(const Network& a, const Network& b);

 private:
  std::size_t n_ = 0;
  bool directed_ = false;
  ValueKind kind_ = ValueKind::kBinary;
  std::size_t num_edges_ = 0;
  std::int64_t total_value_ = 0;
  std::vector<std::size_t> out_offset_{0};
  std::vector<Neighbor> out_;
  std::vector<std::size_t> in_offset_{0};
  std::vector<Neighbor> in_;
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t> index_;
};

// Per-node total of incident values (in + out when directed).
using DegreeVector = std::vector<std::int64_t>;

// Parses "src dst [value]" lines. Identifiers map to dense indices in
// first-appearance order; a line holding a single identifier declares a
// node without edges. Lines starting with '#' are comments. Duplicate pairs
// sum in count mode and are rejected in binary mode.
Network load_edge_list(std::istream& in, bool directed, ValueKind kind);

// Writes node declarations followed by the edges; reloading with the same
// flags reproduces the network exactly.
void write_edge_list(std::ostream& out, const Network& net);

double density(const Network& net);

DegreeVector degrees(const Network& net);

// Real-valued pair weights in [0,1], as read from a weighted edge list.
struct WeightedPairs {
  std::size_t n_nodes = 0;
  bool directed = false;
  std::vector<std::string> labels;
  std::map<std::pair<std::size_t, std::size_t>, double> weights;
};

// Same line format as load_edge_list, with a mandatory real weight.
WeightedPairs load_weighted_edge_list(std::istream& in, bool directed);

// value = floor(w * n_bins), with w = 1 falling in the top bin n_bins.
// Zero results are left absent.
Network discretize_weights(const WeightedPairs& weights, int n_bins);

// Ground-truth label files: "node_id group_label" per line.
std::vector<std::pair<std::string, std::string>> read_label_file(std::istream& in);

}  // namespace sbm
