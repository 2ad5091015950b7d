#include <cmath>
#include <set>

#include "doctest.h"
#include "sbm/errors.h"
#include "sbm/generate.h"
#include "sbm/random.h"

using namespace sbm;

namespace {

BlockParams two_block(double p_in, double p_out, std::vector<double> pi = {0.5, 0.5}) {
  BlockParams p;
  p.kind = ModelKind::kBernoulli;
  p.K = 2;
  p.pi = std::move(pi);
  p.block_matrix = Matrix(2, 2, p_out);
  p.block_matrix(0, 0) = p_in;
  p.block_matrix(1, 1) = p_in;
  return p;
}

}  // namespace

TEST_CASE("splitmix64 finalizer matches the reference sequence") {
  // Reference outputs of SplitMix64 seeded with 0.
  constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
  CHECK(splitmix64_mix(golden) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64_mix(2 * golden) == 0x6E789E6AA1B965F4ULL);
  CHECK(splitmix64_mix(3 * golden) == 0x06C45D188009454FULL);
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  const auto first = a.next_u64();
  CHECK(first == b.next_u64());
  CHECK(first != c.next_u64());
  CHECK(first != d.next_u64());
  RandomStream u(1, 1);
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    const double y = u.uniform_open();
    CHECK(y > 0.0);
    CHECK(y < 1.0);
  }
}

TEST_CASE("poisson sampler moments") {
  for (double lambda : {0.3, 2.5, 9.5, 10.0, 40.0, 250.0}) {
    RandomStream rng(5, static_cast<std::uint64_t>(lambda * 100));
    const int draws = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double x = static_cast<double>(sample_poisson(rng, lambda));
      sum += x;
      sumsq += x * x;
    }
    const double mean = sum / draws;
    const double var = sumsq / draws - mean * mean;
    // 4 standard errors of the mean; the variance check is looser.
    CHECK(std::abs(mean - lambda) < 4.0 * std::sqrt(lambda / draws));
    CHECK(var == doctest::Approx(lambda).epsilon(0.03));
  }
  RandomStream rng(0, 0);
  CHECK(sample_poisson(rng, 0.0) == 0);
}

TEST_CASE("poisson sampler frequencies at a small rate") {
  RandomStream rng(17, 3);
  const double lambda = 1.7;
  const int draws = 200000;
  std::vector<int> counts(8, 0);
  for (int i = 0; i < draws; ++i) {
    const auto x = sample_poisson(rng, lambda);
    if (x < 8) ++counts[x];
  }
  double pmf = std::exp(-lambda);
  for (int k = 0; k < 8; ++k) {
    const double sd = std::sqrt(pmf * (1.0 - pmf) / draws);
    CHECK(std::abs(counts[k] / static_cast<double>(draws) - pmf) < 4.0 * sd + 1e-4);
    pmf *= lambda / (k + 1);
  }
}

TEST_CASE("categorical and dirichlet draws") {
  RandomStream rng(3, 1);
  for (int i = 0; i < 1000; ++i) CHECK(sample_categorical(rng, {0.0, 1.0, 0.0}) == 1);
  for (int K : {1, 2, 5}) {
    const auto x = sample_flat_dirichlet(rng, K);
    double total = 0.0;
    for (double v : x) {
      CHECK(v > 0.0);
      total += v;
    }
    CHECK(total == doctest::Approx(1.0));
  }
}

TEST_CASE("complete graph when p is one") {
  GenConfig cfg;
  cfg.n = 4;
  cfg.params.kind = ModelKind::kBernoulli;
  cfg.params.K = 1;
  cfg.params.pi = {1.0};
  cfg.params.block_matrix = Matrix(1, 1, 1.0);
  const auto [net, part] = sample_sbm(cfg);
  CHECK(net.num_edges() == 6);
  CHECK(part.labels() == std::vector<int>(4, 0));
}

TEST_CASE("degenerate pi puts everyone in the first block") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GenConfig cfg;
    cfg.n = 30;
    cfg.seed = seed;
    cfg.params = two_block(0.5, 0.1, {1.0, 0.0});
    CHECK(sample_sbm(cfg).second.labels() == std::vector<int>(30, 0));
  }
}

TEST_CASE("empirical block frequencies within four standard errors") {
  GenConfig cfg;
  cfg.n = 200;
  cfg.seed = 12345;
  cfg.params = two_block(0.5, 0.1);
  const auto [net, part] = sample_sbm(cfg);
  double in_edges = 0, in_pairs = 0, out_edges = 0, out_pairs = 0;
  for (std::size_t i = 0; i < cfg.n; ++i)
    for (std::size_t j = i + 1; j < cfg.n; ++j) {
      const double y = static_cast<double>(net.value(i, j));
      if (part[i] == part[j]) {
        in_edges += y;
        in_pairs += 1;
      } else {
        out_edges += y;
        out_pairs += 1;
      }
    }
  CHECK(std::abs(in_edges / in_pairs - 0.5) < 0.03);
  CHECK(std::abs(out_edges / out_pairs - 0.1) < 0.02);
  CHECK(std::abs(in_edges / in_pairs - 0.5) < 4.0 * std::sqrt(0.25 / in_pairs));
  CHECK(std::abs(out_edges / out_pairs - 0.1) < 4.0 * std::sqrt(0.09 / out_pairs));
}

TEST_CASE("poisson and degree-corrected rates") {
  GenConfig cfg;
  cfg.n = 120;
  cfg.seed = 9;
  cfg.params.kind = ModelKind::kPoisson;
  cfg.params.K = 1;
  cfg.params.pi = {1.0};
  cfg.params.block_matrix = Matrix(1, 1, std::log(2.0));
  const auto [net, part] = sample_sbm(cfg);
  const double pairs = net.num_pairs();
  CHECK(std::abs(net.total_value() / pairs - 2.0) < 4.0 * std::sqrt(2.0 / pairs));

  cfg.params.kind = ModelKind::kDcPoisson;
  cfg.params.block_matrix = Matrix(1, 1, 0.0);
  std::vector<double> gamma(cfg.n, 0.0);
  for (std::size_t i = 0; i < cfg.n / 2; ++i) gamma[i] = std::log(2.0);
  cfg.params.gamma = gamma;
  const auto [dc, dc_part] = sample_sbm(cfg);
  // Pairs among the first half have rate 4, across halves 2, the rest 1.
  double high = 0, low = 0;
  const std::size_t h = cfg.n / 2;
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = i + 1; j < h; ++j) high += static_cast<double>(dc.value(i, j));
  for (std::size_t i = h; i < cfg.n; ++i)
    for (std::size_t j = i + 1; j < cfg.n; ++j) low += static_cast<double>(dc.value(i, j));
  const double block_pairs = h * (h - 1) / 2.0;
  CHECK(std::abs(high / block_pairs - 4.0) < 4.0 * std::sqrt(4.0 / block_pairs));
  CHECK(std::abs(low / block_pairs - 1.0) < 4.0 * std::sqrt(1.0 / block_pairs));
}

TEST_CASE("same seed gives the same network") {
  GenConfig cfg;
  cfg.n = 50;
  cfg.seed = 77;
  cfg.params = two_block(0.3, 0.05);
  const auto a = sample_sbm(cfg);
  const auto b = sample_sbm(cfg);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  cfg.seed = 78;
  CHECK_FALSE(sample_sbm(cfg).first == a.first);
}

TEST_CASE("directed sampling fills both orientations independently") {
  GenConfig cfg;
  cfg.n = 60;
  cfg.seed = 4;
  cfg.directed = true;
  cfg.params = two_block(0.5, 0.5);
  const auto [net, part] = sample_sbm(cfg);
  CHECK(net.directed());
  std::size_t asymmetric = 0;
  for (std::size_t i = 0; i < cfg.n; ++i)
    for (std::size_t j = i + 1; j < cfg.n; ++j) asymmetric += net.value(i, j) != net.value(j, i);
  CHECK(asymmetric > 0);
}

TEST_CASE("invalid configurations are rejected") {
  GenConfig cfg;
  cfg.n = 10;
  cfg.params = two_block(0.5, 0.1, {0.7, 0.7});
  CHECK_THROWS_AS(sample_sbm(cfg), DataError);
  cfg.params = two_block(0.5, 0.1);
  cfg.n = 1;
  CHECK_THROWS_AS(sample_sbm(cfg), DataError);
}
