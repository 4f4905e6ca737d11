#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <vector>

#include "ronin/common.hpp"
#include "ronin/tensor.hpp"

using namespace ronin;

TEST_CASE("rng streams are deterministic and label-split") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

  Rng root(7);
  Rng c1 = root.child("alpha");
  Rng c2 = root.child("beta");
  Rng c1_again = root.child("alpha");
  REQUIRE(c1.next_u64() == c1_again.next_u64());
  REQUIRE(c1.next_u64() != c2.next_u64());
}

TEST_CASE("uniform stays in range and normal has unit scale") {
  Rng rng(1);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  REQUIRE(std::abs(sum / n) < 0.03);
  REQUIRE(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("poisson sampler matches mean and variance") {
  Rng rng(3);
  SECTION("zero rate is exactly zero") {
    for (int i = 0; i < 10; ++i) REQUIRE(rng.poisson(0.0) == 0);
  }
  SECTION("small lambda") {
    const double lambda = 4.5;
    double sum = 0.0, sq = 0.0;
    const int n = 30000;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(lambda));
      sum += k;
      sq += k * k;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    REQUIRE(mean == Catch::Approx(lambda).epsilon(0.03));
    REQUIRE(var == Catch::Approx(lambda).epsilon(0.06));
  }
  SECTION("large lambda (normal approximation)") {
    const double lambda = 5000.0;
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(lambda));
      sum += k;
      sq += k * k;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    REQUIRE(mean == Catch::Approx(lambda).epsilon(0.01));
    REQUIRE(var == Catch::Approx(lambda).epsilon(0.05));
  }
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) REQUIRE(h.load() == 1);

  REQUIRE_THROWS_AS(
      parallel_for(8, 3,
                   [](std::size_t i) {
                     if (i == 5) throw ParameterError("boom");
                   }),
      ParameterError);
}

TEST_CASE("tensor indexing is row-major and shape-checked") {
  Tensor<float> t(2, 3, 4, 5);
  t.at(1, 2, 3, 4) = 7.0f;
  REQUIRE(t[t.size() - 1] == 7.0f);
  REQUIRE(t.is_finite());
  Tensor<float> u(2, 3, 4, 5);
  u.at(0, 0, 0, 0) = 1.0f;
  t += u;
  REQUIRE(t.at(0, 0, 0, 0) == 1.0f);
  Tensor<float> bad(1, 3, 4, 5);
  REQUIRE_THROWS_AS(t += bad, ParameterError);
}
