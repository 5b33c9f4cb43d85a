#include <catch2/catch_amalgamated.hpp>

#include "hdgcd/quadrature.hpp"

using namespace hdgcd;

TEST_CASE("triangle rule integrates constants to the reference area") {
  for (int deg : {0, 2, 5, 8, 12}) {
    const TriangleRule r = triangle_quadrature(deg);
    CHECK(r.weights.sum() == Catch::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("triangle rule is exact for all monomials up to its degree") {
  for (int deg : {1, 3, 6, 10, 12}) {
    const TriangleRule r = triangle_quadrature(deg);
    for (int a = 0; a + 0 <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        double val = 0.0;
        for (int q = 0; q < r.size(); ++q)
          val += r.weights(q) * std::pow(r.points(q, 0), a) * std::pow(r.points(q, 1), b);
        const double exact = reference_monomial_integral(a, b);
        CAPTURE(deg, a, b);
        CHECK(std::abs(val - exact) <= 1e-13);
      }
    }
  }
}

TEST_CASE("degree 8 rule hits x^3 y^5 at machine accuracy") {
  const TriangleRule r = triangle_quadrature(8);
  double val = 0.0;
  for (int q = 0; q < r.size(); ++q)
    val += r.weights(q) * std::pow(r.points(q, 0), 3) * std::pow(r.points(q, 1), 5);
  const double exact = 6.0 * 120.0 / 3628800.0;  // 3! 5! / 10!
  CHECK(std::abs(val - exact) <= 1e-14);
}

TEST_CASE("unsupported triangle degree is rejected") {
  CHECK_THROWS_AS(triangle_quadrature(kMaxTriangleDegree + 1), std::invalid_argument);
  CHECK_THROWS_AS(triangle_quadrature(-1), std::invalid_argument);
}

TEST_CASE("edge Gauss rules are exact to degree 2m-1") {
  for (int m : {1, 2, 4, 7}) {
    const EdgeRule r = edge_gauss(m);
    CHECK(r.weights.sum() == Catch::Approx(1.0).epsilon(1e-14));
    for (int p = 0; p <= 2 * m - 1; ++p) {
      double val = 0.0;
      for (int q = 0; q < r.size(); ++q) val += r.weights(q) * std::pow(r.points(q), p);
      CHECK(val == Catch::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
  }
}
