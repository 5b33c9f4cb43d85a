#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "hdgcd/basis.hpp"
#include "hdgcd/local_solver.hpp"
#include "hdgcd/mesh.hpp"
#include "hdgcd/quadrature.hpp"

using namespace hdgcd;

TEST_CASE("reference scalar basis is orthonormal") {
  for (int k = 0; k <= 4; ++k) {
    const ScalarBasis sb(k);
    const TriangleRule rule = triangle_quadrature(2 * k + 2);
    const BasisTable t = sb.evaluate(rule.points);
    const Eigen::MatrixXd M = t.value * rule.weights.asDiagonal() * t.value.transpose();
    CAPTURE(k);
    CHECK((M - Eigen::MatrixXd::Identity(sb.dim(), sb.dim())).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("scalar basis spans P_k: monomials are reproduced") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k <= 4; ++k) {
    const ScalarBasis sb(k);
    const TriangleRule rule = triangle_quadrature(2 * k + 2);
    const BasisTable t = sb.evaluate(rule.points);
    for (int a = 0; a + 0 <= k; ++a)
      for (int b = 0; a + b <= k; ++b) {
        // L2-project the monomial, then compare values at random points
        Eigen::VectorXd mono(rule.size());
        for (int q = 0; q < rule.size(); ++q)
          mono(q) = std::pow(rule.points(q, 0), a) * std::pow(rule.points(q, 1), b);
        const Eigen::VectorXd coeff = t.value * rule.weights.cwiseProduct(mono);
        PointList pts(20, 2);
        for (int i = 0; i < 20; ++i) {
          const double x = unit(rng), y = unit(rng) * (1.0 - x);
          pts(i, 0) = x;
          pts(i, 1) = y;
        }
        const Eigen::VectorXd vals = sb.evaluate(pts).value.transpose() * coeff;
        for (int i = 0; i < 20; ++i) {
          const double exact = std::pow(pts(i, 0), a) * std::pow(pts(i, 1), b);
          CAPTURE(k, a, b);
          CHECK(std::abs(vals(i) - exact) <= 1e-12);
        }
      }
  }
}

TEST_CASE("basis gradients match finite differences") {
  const ScalarBasis sb(3);
  PointList p(1, 2);
  p << 0.31, 0.27;
  const double h = 1e-6;
  PointList px0 = p, px1 = p, py0 = p, py1 = p;
  px0(0, 0) -= h;
  px1(0, 0) += h;
  py0(0, 1) -= h;
  py1(0, 1) += h;
  const BasisTable t = sb.evaluate(p);
  const Eigen::MatrixXd fx = (sb.evaluate(px1).value - sb.evaluate(px0).value) / (2 * h);
  const Eigen::MatrixXd fy = (sb.evaluate(py1).value - sb.evaluate(py0).value) / (2 * h);
  CHECK((t.dx - fx).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((t.dy - fy).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("face basis mass matrix is the identity regardless of length") {
  for (double L : {0.05, 1.0, std::sqrt(2.0)}) {
    for (int k = 0; k <= 3; ++k) {
      const FaceBasis fb(k, L);
      const EdgeRule r = edge_gauss(k + 2);
      const Eigen::MatrixXd vals = fb.evaluate(r.points);
      const Eigen::MatrixXd M = vals * (L * r.weights).asDiagonal() * vals.transpose();
      CHECK((M - Eigen::MatrixXd::Identity(k + 1, k + 1)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("vector space dimensions") {
  for (int k = 0; k <= 3; ++k) {
    CHECK(vector_space_dim(k, VectorSpace::Plain) == (k + 1) * (k + 2));
    CHECK(vector_space_dim(k, VectorSpace::RtEnriched) == (k + 1) * (k + 3));
  }
}

TEST_CASE("enriched vector basis has full rank with moderate conditioning") {
  const Mesh mesh = structured_unit_square(3);
  const ElementGeometry geom = element_geometry(mesh, 4);
  for (int k = 0; k <= 3; ++k) {
    const ScalarBasis sb(k);
    const ElementBasis basis(sb, VectorSpace::RtEnriched, geom);
    const TriangleRule rule = triangle_quadrature(2 * (k + 1) + 2);
    PointList phys(rule.size(), 2);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = geom.p[0] + geom.A * rule.points.row(q).transpose();
      phys(q, 0) = x.x();
      phys(q, 1) = x.y();
    }
    const ElementBasisValues bv = basis.evaluate(rule.points, phys);
    const Eigen::VectorXd w = rule.weights * geom.det;
    const Eigen::MatrixXd G = bv.v_x * w.asDiagonal() * bv.v_x.transpose() +
                              bv.v_y * w.asDiagonal() * bv.v_y.transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const int nv = vector_space_dim(k, VectorSpace::RtEnriched);
    REQUIRE(es.eigenvalues().minCoeff() > 0.0);
    CHECK(es.eigenvalues().size() == nv);
    CHECK(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff() < 1e8);
  }
}

TEST_CASE("enriched divergence matches finite differences") {
  const Mesh mesh = structured_unit_square(2);
  const ElementGeometry geom = element_geometry(mesh, 1);
  const ScalarBasis sb(2);
  const ElementBasis basis(sb, VectorSpace::RtEnriched, geom);
  auto eval_at = [&](const Vec2& phys_pt) {
    PointList ref(1, 2), phys(1, 2);
    const Vec2 r = geom.Ainv * (phys_pt - geom.p[0]);
    ref(0, 0) = r.x();
    ref(0, 1) = r.y();
    phys(0, 0) = phys_pt.x();
    phys(0, 1) = phys_pt.y();
    return basis.evaluate(ref, phys);
  };
  const Vec2 x0 = geom.centroid;
  const double h = 1e-6;
  const ElementBasisValues c = eval_at(x0);
  const ElementBasisValues xp = eval_at(x0 + Vec2(h, 0)), xm = eval_at(x0 - Vec2(h, 0));
  const ElementBasisValues yp = eval_at(x0 + Vec2(0, h)), ym = eval_at(x0 - Vec2(0, h));
  for (int i = 0; i < basis.vector_dim(); ++i) {
    const double div_fd = (xp.v_x(i, 0) - xm.v_x(i, 0)) / (2 * h) +
                          (yp.v_y(i, 0) - ym.v_y(i, 0)) / (2 * h);
    CHECK(std::abs(c.v_div(i, 0) - div_fd) <= 1e-7);
  }
}
