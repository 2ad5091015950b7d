#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "sbm/errors.h"
#include "sbm/eval.h"
#include "test_support.h"

using namespace sbm;

namespace {

struct PairCounts {
  double both = 0, only_a = 0, only_b = 0, neither = 0;
};

PairCounts scan_pairs(const Partition& a, const Partition& b) {
  PairCounts c;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool in_a = a[i] == a[j];
      const bool in_b = b[i] == b[j];
      if (in_a && in_b) ++c.both;
      else if (in_a) ++c.only_a;
      else if (in_b) ++c.only_b;
      else ++c.neither;
    }
  return c;
}

Partition permuted(const Partition& p, std::mt19937_64& gen) {
  std::vector<int> perm(p.K());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  std::vector<int> labels(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) labels[i] = perm[p[i]];
  return Partition(labels, p.K());
}

}  // namespace

TEST_CASE("rand index examples") {
  const Partition a({0, 0, 1}, 2), b({0, 1, 1}, 2);
  const PartitionComparison cmp = rand_index(a, b);
  CHECK(cmp.rand_index == doctest::Approx(1.0 / 3));
  CHECK(cmp.agreements == 1);
  CHECK(cmp.total_pairs == 3);
  CHECK(cmp.confusion == std::vector<std::vector<std::uint64_t>>{{1, 1}, {0, 1}});
  CHECK(rand_index(a, a).rand_index == 1.0);
  CHECK(rand_index(a, a).adjusted_rand == 1.0);
  CHECK(rand_index(a, Partition({1, 1, 0}, 2)).rand_index == 1.0);
}

TEST_CASE("adjusted rand reference value") {
  // 4/7 for (0,0,1,1) against (0,0,1,2).
  const PartitionComparison cmp = rand_index(Partition({0, 0, 1, 1}, 2), Partition({0, 0, 1, 2}, 3));
  CHECK(cmp.adjusted_rand == doctest::Approx(4.0 / 7.0));
  CHECK(cmp.rand_index == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("contingency formula equals the pair scan") {
  std::mt19937_64 gen(71);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 49;
    const int Ka = 1 + trial % 5, Kb = 1 + (trial / 5) % 4;
    const Partition a(sbm::testing::random_labels(gen, n, Ka), Ka);
    const Partition b(sbm::testing::random_labels(gen, n, Kb), Kb);
    const PairCounts c = scan_pairs(a, b);
    const PartitionComparison cmp = rand_index(a, b);
    const double pairs = n * (n - 1) / 2.0;
    CHECK(static_cast<double>(cmp.total_pairs) == pairs);
    CHECK(static_cast<double>(cmp.agreements) == c.both + c.neither);
    CHECK(cmp.rand_index == doctest::Approx((c.both + c.neither) / pairs));

    // Closed form of the adjusted index in pair counts.
    const double denom = (c.both + c.only_a) * (c.only_a + c.neither) + (c.both + c.only_b) * (c.only_b + c.neither);
    if (denom > 0)
      CHECK(cmp.adjusted_rand ==
            doctest::Approx(2.0 * (c.both * c.neither - c.only_a * c.only_b) / denom).scale(1.0));

    const PartitionComparison flipped = rand_index(b, a);
    CHECK(flipped.rand_index == cmp.rand_index);
    CHECK(flipped.adjusted_rand == doctest::Approx(cmp.adjusted_rand).scale(1.0));
    CHECK(rand_index(permuted(a, gen), permuted(b, gen)).rand_index == cmp.rand_index);
  }
}

TEST_CASE("confusion rows sum to block sizes") {
  std::mt19937_64 gen(72);
  const Partition a(sbm::testing::random_labels(gen, 40, 3), 3);
  const Partition b(sbm::testing::random_labels(gen, 40, 4), 4);
  const auto cmp = rand_index(a, b);
  const auto sizes = a.block_sizes();
  for (int k = 0; k < 3; ++k)
    CHECK(std::accumulate(cmp.confusion[k].begin(), cmp.confusion[k].end(), std::uint64_t{0}) == sizes[k]);
}

TEST_CASE("length mismatch is rejected") {
  CHECK_THROWS_AS(rand_index(Partition({0, 1}, 2), Partition({0, 1, 1}, 2)), DataError);
}

TEST_CASE("lowest scores with index tie-break") {
  const std::vector<double> scores{0.9, 0.5, 0.7, 0.5, 1.0};
  CHECK(lowest_scoring_nodes(scores, 3) == std::vector<std::size_t>{1, 3, 2});
  CHECK(lowest_scoring_nodes(scores, 0).empty());
  CHECK(lowest_scoring_nodes(scores, 10).size() == 5);
}
