#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vsrlab/rng.hpp"
#include "vsrlab/stats.hpp"

using namespace vsr;

TEST_CASE("mann_whitney_u exact case {1,2} vs {3,4}") {
  std::vector<double> a = {1, 2}, b = {3, 4};
  const auto [u, p] = mann_whitney_u(a, b);
  CHECK(u == doctest::Approx(0.0));
  CHECK(p == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("mann_whitney_u identical samples give p = 1") {
  std::vector<double> a = {1, 2, 3, 4}, b = {1, 2, 3, 4};
  CHECK(mann_whitney_u(a, b).p == doctest::Approx(1.0));
  std::vector<double> c(6, 2.5), d(4, 2.5);
  CHECK(mann_whitney_u(c, d).p == doctest::Approx(1.0));  // degenerate
}

TEST_CASE("mann_whitney_u is invariant under strictly increasing transforms") {
  Rng rng = make_stream(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(5), b(7);
    for (double& v : a) v = uniform_real(rng, -3.0, 3.0);
    for (double& v : b) v = uniform_real(rng, -3.0, 3.0);
    const auto base = mann_whitney_u(a, b);
    auto warp = [](double v) { return std::exp(v) + 3.0 * v; };
    for (double& v : a) v = warp(v);
    for (double& v : b) v = warp(v);
    const auto warped = mann_whitney_u(a, b);
    CHECK(base.u == doctest::Approx(warped.u));
    CHECK(base.p == doctest::Approx(warped.p));
  }
}

TEST_CASE("mann_whitney_u exact p matches full enumeration for n+m <= 10") {
  Rng rng = make_stream(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = uniform_int(rng, 1, 5);
    const int n = uniform_int(rng, 1, std::min(5, 10 - m));
    std::vector<double> a(m), b(n);
    for (double& v : a) v = uniform_real(rng, 0.0, 1.0);
    for (double& v : b) v = uniform_real(rng, 0.0, 1.0);
    const double got = mann_whitney_u(a, b).p;
    const double want = oracle::mw_exact_p(a, b);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("mann_whitney_u exact and approximate modes roughly agree") {
  Rng rng = make_stream(77);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(8), b(8);  // 16 > 12: approximate path
    for (double& v : a) v = uniform_real(rng, 0.0, 1.0);
    for (double& v : b) v = uniform_real(rng, 0.2, 1.2);
    const double p_approx = mann_whitney_u(a, b).p;
    const double p_exact = oracle::mw_exact_p(a, b);
    CHECK(std::abs(p_approx - p_exact) < 0.05);
  }
}

TEST_CASE("benjamini_hochberg worked example and properties") {
  SUBCASE("hand-executed step-up") {
    std::vector<double> p = {0.01, 0.04, 0.03};
    const std::vector<double> adj = benjamini_hochberg(p);
    REQUIRE(adj.size() == 3);
    CHECK(adj[0] == doctest::Approx(0.03));
    CHECK(adj[1] == doctest::Approx(0.04));
    CHECK(adj[2] == doctest::Approx(0.04));
  }
  SUBCASE("uniform p stays put") {
    std::vector<double> p(5, 0.2);
    for (double v : benjamini_hochberg(p)) CHECK(v == doctest::Approx(0.2));
  }
  SUBCASE("single p is unchanged") {
    std::vector<double> p = {0.42};
    CHECK(benjamini_hochberg(p)[0] == doctest::Approx(0.42));
  }
  SUBCASE("adjusted values are monotone in raw values and >= raw") {
    Rng rng = make_stream(13);
    std::vector<double> p(20);
    for (double& v : p) v = uniform_real(rng, 0.0, 1.0);
    const std::vector<double> adj = benjamini_hochberg(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(adj[i] >= p[i] - 1e-15);
      for (std::size_t j = 0; j < p.size(); ++j)
        if (p[i] <= p[j]) CHECK(adj[i] <= adj[j] + 1e-15);
    }
  }
}

TEST_CASE("pairwise_comparison builds symmetric unit-diagonal matrices") {
  std::vector<std::pair<std::string, std::vector<double>>> groups = {
      {"a", {1.0, 2.0, 3.0, 4.0, 5.0}},
      {"b", {6.0, 7.0, 8.0, 9.0, 10.0}},
      {"c", {1.5, 2.5, 3.5, 4.5, 5.5}},
  };
  const StatsResult r = pairwise_comparison(groups, 0.05);
  REQUIRE(r.labels.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(r.p_raw[i][i] == doctest::Approx(1.0));
    for (int j = 0; j < 3; ++j) {
      CHECK(r.p_raw[i][j] == doctest::Approx(r.p_raw[j][i]));
      CHECK(r.p_adjusted[i][j] >= r.p_raw[i][j] - 1e-15);
      CHECK(r.significant[i][j] == (r.p_adjusted[i][j] < r.alpha));
    }
  }
}
