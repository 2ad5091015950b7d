#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sbm/models.h"

namespace sbm {

struct PartitionComparison {
  double rand_index = 1.0;
  std::uint64_t agreements = 0;
  std::uint64_t total_pairs = 0;
  // confusion[k][l]: nodes in block k of the first partition and block l of the second.
  std::vector<std::vector<std::uint64_t>> confusion;
  // Hubert-Arabie adjusted Rand index; not the plain index above.
  double adjusted_rand = 1.0;
};

// Plain Rand index via the contingency table: a pair agrees when both
// partitions put it together or both keep it apart.
PartitionComparison rand_index(const Partition& a, const Partition& b);

// The m nodes with the smallest scores, ties broken by node index.
std::vector<std::size_t> lowest_scoring_nodes(std::span<const double> scores, std::size_t m);

}  // namespace sbm
