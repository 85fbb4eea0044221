#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "entroprune/entropy.hpp"
#include "entroprune/errors.hpp"
#include "reference.hpp"

using namespace entroprune;

namespace {

AttentionTensor single_head(std::vector<std::vector<double>> rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return AttentionTensor{{m}};
}

AttentionTensor uniform_attention(std::size_t heads, std::size_t n) {
  return AttentionTensor{std::vector<Matrix>(heads, Matrix(n, n, 1.0 / static_cast<double>(n)))};
}

// Random probability vectors of assorted shapes: smooth, peaked, sparse, one-hot.
std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t m) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double temperature = std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
  std::vector<double> p(m);
  for (double& v : p) v = std::exp(g(rng) * temperature);
  if (rng() % 4 == 0) {
    for (double& v : p)
      if (rng() % 3 == 0) v = 0.0;
  }
  if (rng() % 20 == 0) {
    std::fill(p.begin(), p.end(), 0.0);
    p[rng() % m] = 1.0;
  }
  if (std::accumulate(p.begin(), p.end(), 0.0) == 0.0) p[0] = 1.0;
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  return p;
}

Matrix random_attention_logits(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 2.0);
  Matrix m(n, n);
  for (double& v : m.data()) v = g(rng);
  return m;
}

}  // namespace

TEST_CASE("patch_attention_distribution: examples") {
  const auto uniform = uniform_attention(1, 4);
  const auto d = patch_attention_distribution(uniform, 0, 0);
  REQUIRE(d.size() == 3);
  for (double v : d) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const auto on_class = single_head({{1, 0, 0}, {1, 0, 0}, {0.5, 0.25, 0.25}});
  CHECK_THROWS_AS(patch_attention_distribution(on_class, 0, 0), DegenerateDistributionError);
  CHECK(patch_attention_distribution(on_class, 0, 1) == std::vector<double>{0.5, 0.5});

  CHECK_THROWS_AS(patch_attention_distribution(on_class, 0, 2), IndexError);
  CHECK_THROWS_AS(patch_attention_distribution(on_class, 1, 0), IndexError);
}

TEST_CASE("patch_attention_distribution: renormalized slice equals restricted softmax") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 8;
    const Matrix logits = random_attention_logits(rng, n);
    const AttentionTensor a{{softmax_rows(logits)}};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto slice = patch_attention_distribution(a, 0, i);
      const auto row = logits.row(i + 1);
      const auto oracle = reference::restricted_softmax({row.begin(), row.end()});
      for (std::size_t j = 0; j < slice.size(); ++j) CHECK(std::abs(slice[j] - oracle[j]) <= 1e-12);
    }
  }
}

TEST_CASE("patch_attention_distribution: class key can be included for ablation") {
  const auto a = single_head({{0.2, 0.4, 0.4}, {0.5, 0.25, 0.25}, {0.1, 0.1, 0.8}});
  const auto d = patch_attention_distribution(a, 0, 0, ScoringOptions{true});
  CHECK(d == std::vector<double>{0.5, 0.25, 0.25});
  const auto s = head_averaged_scores(a, Criterion::shannon(), 0, ScoringOptions{true});
  CHECK(s.values[0] == doctest::Approx(1.0397207708399179).epsilon(1e-14));
}

TEST_CASE("shannon_entropy: examples") {
  CHECK(shannon_entropy(std::vector<double>(196, 1.0 / 196.0)) == doctest::Approx(std::log(196.0)).epsilon(1e-14));
  CHECK(std::log(196.0) == doctest::Approx(5.2781).epsilon(1e-5));
  CHECK(shannon_entropy(std::vector<double>{0, 1, 0}) == 0.0);
  CHECK(shannon_entropy(std::vector<double>{0.5, 0.25, 0.25}) == doctest::Approx(1.0397207708399179).epsilon(1e-15));
}

TEST_CASE("renyi_entropy: examples and errors") {
  for (double alpha : {0.5, 2.0, 5.0, 10.0}) {
    for (std::size_t m : {2u, 7u, 196u}) {
      const std::vector<double> u(m, 1.0 / static_cast<double>(m));
      CHECK(std::abs(renyi_entropy(u, alpha) - std::log(static_cast<double>(m))) <= 1e-12);
    }
  }
  CHECK(renyi_entropy(std::vector<double>{0.5, 0.25, 0.25}, 2.0) ==
        doctest::Approx(0.9808292530117262).epsilon(1e-15));
  CHECK(renyi_entropy(std::vector<double>{0, 0, 1}, 3.0) == 0.0);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = random_distribution(rng, 2 + rng() % 300);
    const double h = shannon_entropy(d);
    CHECK(std::abs(renyi_entropy(d, 1.0 + 1e-4) - h) <= 1e-3);
    CHECK(std::abs(renyi_entropy(d, 1.0 - 1e-4) - h) <= 1e-3);
  }

  const std::vector<double> d{0.5, 0.5};
  CHECK_THROWS_AS(renyi_entropy(d, 1.0), InvalidOrderError);
  CHECK_THROWS_AS(renyi_entropy(d, 0.0), InvalidOrderError);
  CHECK_THROWS_AS(renyi_entropy(d, -2.0), InvalidOrderError);
  CHECK_THROWS_AS(Criterion::renyi(1.0), InvalidOrderError);
}

TEST_CASE("entropies: bounds, order monotonicity, permutation invariance (property)") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> order(0.05, 20.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t m = 2 + rng() % 511;
    auto d = random_distribution(rng, m);
    const double logm = std::log(static_cast<double>(m));
    const double h = shannon_entropy(d);
    CHECK(h >= -1e-9);
    CHECK(h <= logm + 1e-9);

    double a1 = order(rng), a2 = order(rng);
    if (a1 == 1.0 || a2 == 1.0 || a1 == a2) continue;
    if (a1 > a2) std::swap(a1, a2);
    const double h1 = renyi_entropy(d, a1), h2 = renyi_entropy(d, a2);
    CHECK(h1 >= -1e-9);
    CHECK(h1 <= logm + 1e-9);
    CHECK(h1 >= h2 - 1e-10);
    if (a1 < 1.0 && a2 > 1.0) {
      CHECK(h1 >= h - 1e-10);
      CHECK(h >= h2 - 1e-10);
    }

    auto shuffled = d;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(shannon_entropy(shuffled) == h);
    CHECK(renyi_entropy(shuffled, a1) == h1);
  }
}

TEST_CASE("entropies agree with the direct-summation oracle on 10k distributions") {
  std::mt19937_64 rng(51);
  const double alphas[] = {0.5, 2.0, 5.0, 10.0, 1.0001, 0.9999};
  for (int trial = 0; trial < 10000; ++trial) {
    const auto d = random_distribution(rng, 2 + rng() % 511);
    CHECK(std::abs(shannon_entropy(d) - reference::naive_entropy(d)) <= 1e-9);
    const double alpha = alphas[trial % 6];
    CHECK(std::abs(renyi_entropy(d, alpha) - reference::naive_entropy(d, alpha)) <= 1e-9);
  }
  CHECK(reference::naive_entropy({0.0, 1.0}) == 0.0);
  CHECK(reference::naive_entropy({0.25, 0.25, 0.25, 0.25}, 3.0) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
}

TEST_CASE("head_averaged_scores: examples") {
  const auto a = single_head({{0.1, 0.6, 0.3, 0.0}, {0.0, 0.5, 0.25, 0.25}, {0.2, 0.2, 0.2, 0.4}, {0.0, 1.0, 0.0, 0.0}});
  const auto s = head_averaged_scores(a, Criterion::shannon(), 4);
  REQUIRE(s.values.size() == 3);
  CHECK(s.block == 4);
  CHECK(s.values[0] == shannon_entropy(patch_attention_distribution(a, 0, 0)));
  CHECK(s.values[1] == doctest::Approx(std::log(2.0) * 0.5 + std::log(4.0) * 0.5).epsilon(1e-14));
  CHECK(s.values[2] == 0.0);

  AttentionTensor twice{{a.heads[0], a.heads[0]}};
  CHECK(head_averaged_scores(twice, Criterion::renyi(2.0)).values == head_averaged_scores(a, Criterion::renyi(2.0)).values);

  // Two heads, three patches, hand-set rows.
  AttentionTensor two{{a.heads[0], single_head({{0.25, 0.25, 0.25, 0.25},
                                                 {0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3},
                                                 {0.0, 0.0, 0.0, 1.0},
                                                 {0.5, 0.0, 0.5, 0.0}}).heads[0]}};
  const auto mixed = head_averaged_scores(two, Criterion::shannon());
  const double head0[3] = {std::log(2.0) * 0.5 + std::log(4.0) * 0.5, -(0.25 * std::log(0.25) * 2 + 0.5 * std::log(0.5)), 0.0};
  const double head1[3] = {std::log(3.0), 0.0, 0.0};
  for (int i = 0; i < 3; ++i) CHECK(mixed.values[i] == doctest::Approx((head0[i] + head1[i]) / 2).epsilon(1e-14));
}

TEST_CASE("head averaging is the mean of entropies, not the entropy of the mean (Jensen counterexample)") {
  const auto h0 = single_head({{0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.5, 0.5}}).heads[0];
  const auto h1 = single_head({{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.5, 0.5}}).heads[0];
  const AttentionTensor a{{h0, h1}};
  const auto scores = head_averaged_scores(a, Criterion::shannon());
  CHECK(scores.values[0] == 0.0);  // both heads are one-hot for patch 0

  Matrix mean = h0;
  for (std::size_t i = 0; i < mean.size(); ++i) mean.data()[i] = 0.5 * (h0.data()[i] + h1.data()[i]);
  const auto pooled = head_averaged_scores(AttentionTensor{{mean}}, Criterion::shannon());
  CHECK(pooled.values[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("head_averaged_scores: degenerate rows report context") {
  const auto a = single_head({{1, 0, 0}, {1, 0, 0}, {0, 0.5, 0.5}});
  try {
    head_averaged_scores(a, Criterion::shannon(), 7);
    FAIL("expected DegenerateDistributionError");
  } catch (const DegenerateDistributionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("block 7") != std::string::npos);
    CHECK(msg.find("head 0") != std::string::npos);
    CHECK(msg.find("patch 0") != std::string::npos);
  }
  CHECK_THROWS_AS(head_averaged_scores(single_head({{1.0}}), Criterion::shannon()), ShapeError);
}

TEST_CASE("evit_cls_score: examples") {
  const auto uniform = evit_cls_score(uniform_attention(3, 5));
  for (double v : uniform.values) CHECK(v == uniform.values[0]);
  CHECK(uniform.higher_is_important());

  const auto one_hot = evit_cls_score(single_head({{0, 0, 1, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}}));
  CHECK(one_hot.values == std::vector<double>{0, 1, 0});

  const auto h0 = single_head({{0.1, 0.2, 0.3, 0.4}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}}).heads[0];
  const auto h1 = single_head({{0.4, 0.4, 0.2, 0.0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}}).heads[0];
  const auto two = evit_cls_score(AttentionTensor{{h0, h1}});
  CHECK(two.values[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(two.values[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(two.values[2] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(head_averaged_scores(AttentionTensor{{h0, h1}}, Criterion::evit(), 3).values == two.values);
}

TEST_CASE("random scores are reproducible") {
  CHECK(random_scores(10, 7) == random_scores(10, 7));
  CHECK(random_scores(10, 7) != random_scores(10, 8));
  const auto a = uniform_attention(1, 5);
  CHECK(head_averaged_scores(a, Criterion::random(3), 4).values == head_averaged_scores(a, Criterion::random(3), 4).values);
  CHECK(head_averaged_scores(a, Criterion::random(3), 4).values != head_averaged_scores(a, Criterion::random(3), 7).values);
}

TEST_CASE("attention_distance: examples") {
  // Identity over patches: every query attends to itself.
  const auto identity = single_head({{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}});
  CHECK(attention_distance(identity, std::vector<std::size_t>{0, 1, 2, 3}, 2, 16) == std::vector<double>{0.0});

  const auto swap = single_head({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}});
  CHECK(attention_distance(swap, std::vector<std::size_t>{0, 1}, 2, 16) == std::vector<double>{16.0});

  // 2x2 grid, uniform attention: brute force over all 16 query-key pairs.
  const auto uniform = uniform_attention(2, 5);
  double brute = 0.0;
  for (int q = 0; q < 4; ++q)
    for (int k = 0; k < 4; ++k) brute += std::hypot(q / 2 - k / 2, q % 2 - k % 2) * 16.0;
  brute /= 16.0;
  const auto dist = attention_distance(uniform, std::vector<std::size_t>{0, 1, 2, 3}, 2, 16);
  REQUIRE(dist.size() == 2);
  CHECK(dist[0] == doctest::Approx(brute).epsilon(1e-14));
  CHECK(dist[0] == doctest::Approx(8.0 + 4.0 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("parse_criterion") {
  CHECK(parse_criterion("shannon").kind == Criterion::Kind::shannon);
  CHECK(parse_criterion("renyi", 5.0).alpha == 5.0);
  CHECK(parse_criterion("renyi:10").alpha == 10.0);
  CHECK(parse_criterion("evit").higher_is_important());
  CHECK(parse_criterion("random", 2.0, 99).seed == 99);
  CHECK(parse_criterion("renyi:2").label() == "renyi(a=2)");
  CHECK_THROWS_AS(parse_criterion("renyi:1"), ConfigError);
  CHECK_THROWS_AS(parse_criterion("renyi:x"), ConfigError);
  CHECK_THROWS_AS(parse_criterion("gini"), ConfigError);
}
