#include "sbm/eval.h"

#include <algorithm>
#include <numeric>

#include "sbm/errors.h"

namespace sbm {

namespace {
std::uint64_t choose2(std::uint64_t x) { return x < 2 ? 0 : x * (x - 1) / 2; }
}  // namespace

PartitionComparison rand_index(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw DataError("partitions have different lengths");
  PartitionComparison cmp;
  cmp.confusion.assign(a.K(), std::vector<std::uint64_t>(b.K(), 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++cmp.confusion[a[i]][b[i]];

  std::uint64_t together_both = 0, together_a = 0, together_b = 0;
  std::vector<std::uint64_t> col(b.K(), 0);
  for (const auto& row : cmp.confusion) {
    std::uint64_t row_total = 0;
    for (std::size_t l = 0; l < row.size(); ++l) {
      together_both += choose2(row[l]);
      row_total += row[l];
      col[l] += row[l];
    }
    together_a += choose2(row_total);
  }
  for (std::uint64_t c : col) together_b += choose2(c);

  const std::uint64_t n = a.size();
  cmp.total_pairs = choose2(n);
  // together in both + apart in both
  cmp.agreements = cmp.total_pairs + 2 * together_both - together_a - together_b;
  cmp.rand_index = cmp.total_pairs == 0 ? 1.0
                                        : static_cast<double>(cmp.agreements) / static_cast<double>(cmp.total_pairs);

  const double pairs = static_cast<double>(cmp.total_pairs);
  const double expected = pairs == 0.0 ? 0.0 : static_cast<double>(together_a) * static_cast<double>(together_b) / pairs;
  const double max_index = 0.5 * (static_cast<double>(together_a) + static_cast<double>(together_b));
  const double denom = max_index - expected;
  cmp.adjusted_rand = denom == 0.0 ? 1.0 : (static_cast<double>(together_both) - expected) / denom;
  return cmp;
}

std::vector<std::size_t> lowest_scoring_nodes(std::span<const double> scores, std::size_t m) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return scores[x] < scores[y]; });
  order.resize(std::min(m, order.size()));
  return order;
}

}  // namespace sbm
