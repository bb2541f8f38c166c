#include "helpers.hpp"
#include "shiftlab/vandermonde.hpp"

#include <doctest.h>

#include <set>

using namespace shiftlab;
using namespace testing_helpers;

namespace {

// det of (p_c^{t-1}) = prod_{c < c'} (p_{c'} - p_c)
BigInt vandermonde_product(const std::vector<BigInt>& p) {
  BigInt r = 1;
  for (std::size_t c = 0; c < p.size(); ++c)
    for (std::size_t c2 = c + 1; c2 < p.size(); ++c2) r *= p[c2] - p[c];
  return r;
}

// Coefficients of prod_v (y_v + x m_v)^{i_v} as a polynomial in x.
std::vector<BigInt> expand_univariate(const ExponentVector& i, const std::vector<BigInt>& m,
                                      const std::vector<BigInt>& y) {
  std::vector<BigInt> poly{1};
  for (std::size_t v = 0; v < i.size(); ++v)
    for (unsigned rep = 0; rep < i[v]; ++rep) {
      std::vector<BigInt> next(poly.size() + 1, 0);
      for (std::size_t k = 0; k < poly.size(); ++k) {
        next[k] += poly[k] * y[v];
        next[k + 1] += poly[k] * m[v];
      }
      poly = std::move(next);
    }
  return poly;
}

}  // namespace

TEST_CASE("monomial_count examples") {
  CHECK(monomial_count(2, 3) == 4);
  CHECK(monomial_count(5, 2) == 15);
  CHECK(monomial_count(1, 7) == 1);
  CHECK(monomial_count(3, 0) == 1);
  CHECK(total_monomial_count(5, 2) == 20);
}

TEST_CASE("build_directions examples") {
  auto d22 = build_directions(2, 2);
  REQUIRE(d22.vectors.size() == 3);
  CHECK(d22.vectors[0] == std::vector<BigInt>{1, 1});
  CHECK(d22.vectors[1] == std::vector<BigInt>{1, 2});
  CHECK(d22.vectors[2] == std::vector<BigInt>{1, 4});
  auto d23 = build_directions(2, 3);
  REQUIRE(d23.vectors.size() == 4);
  for (std::size_t t = 0; t < 4; ++t) CHECK(d23.vectors[t] == std::vector<BigInt>{1, BigInt(1) << t});
  auto d32 = build_directions(3, 2);
  CHECK(d32.nu == std::vector<BigInt>{1, 2, 8});
  CHECK_THROWS_AS(build_directions(30, 3), BudgetExceeded);
  CHECK_THROWS_AS(build_directions(2, 1), InvalidArgument);
}

TEST_CASE("build_family examples") {
  auto fam = build_family(build_directions(2, 2));
  CHECK(fam.delta(2) == 6);
  CHECK(fam.delta(1) == 1);
  CHECK(vandermonde_parameters(build_directions(2, 2), 2) == std::vector<BigInt>{1, 2, 4});
  for (unsigned d = 2; d <= 4; ++d) {
    auto f1 = build_family(build_directions(1, d));
    for (unsigned j = 1; j <= d; ++j) {
      CHECK(f1.delta(j) == 1);
      CHECK(f1.M(j).rows() == 1);
    }
  }
}

TEST_CASE("determinants agree with the Vandermonde product") {
  for (std::size_t n = 1; n <= 3; ++n)
    for (unsigned d = 2; d <= 4; ++d) {
      auto dirs = build_directions(n, d);
      auto fam = build_family(dirs);
      for (unsigned j = 1; j <= d; ++j) {
        auto params = vandermonde_parameters(dirs, j);
        CHECK(fam.delta(j) == vandermonde_product(params));
        std::set<BigInt> distinct(params.begin(), params.end());
        CHECK(distinct.size() == params.size());
      }
    }
}

TEST_CASE("Delta_j M_j^{-1} is integral and inverts M_j") {
  for (std::size_t n = 2; n <= 3; ++n)
    for (unsigned d = 2; d <= 3; ++d) {
      auto fam = build_family(build_directions(n, d));
      for (unsigned j = 1; j <= d; ++j) {
        IntMatrix adj = adjugate(fam.M(j));
        IntMatrix prod = multiply(adj, fam.M(j));
        IntMatrix expected = IntMatrix::identity(prod.rows());
        for (std::size_t r = 0; r < expected.rows(); ++r) expected(r, r) = fam.delta(j);
        CHECK(prod == expected);
      }
    }
}

TEST_CASE("z_coefficient examples") {
  std::vector<BigInt> m{1, 2}, y{0, 5};
  CHECK(z_coefficient(1, ev({1, 1}), m, y) == 5);
  CHECK(z_coefficient(2, ev({1, 1}), m, y) == 2);
  std::vector<BigInt> y2{7, -3};
  CHECK(z_coefficient(2, ev({1, 1}), m, y2) == 2);
  CHECK(z_coefficient(3, ev({2, 1}), {3, 5}, {7, 11}) == 9 * 5);
  CHECK_THROWS_AS(z_coefficient(1, ev({1, 1}), {1}, y), DimensionMismatch);
}

TEST_CASE("z_coefficient reproduces the univariate expansion") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> small(-4, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 3;
    std::vector<std::uint32_t> e(n);
    for (auto& v : e) v = rng() % 4;
    ExponentVector i(e);
    std::vector<BigInt> m(n), y(n);
    for (std::size_t v = 0; v < n; ++v) {
      m[v] = small(rng);
      y[v] = small(rng);
    }
    auto poly = expand_univariate(i, m, y);
    for (unsigned j = 1; j <= i.degree(); ++j) CHECK(z_coefficient(j, i, m, y) == poly[j]);
  }
}
