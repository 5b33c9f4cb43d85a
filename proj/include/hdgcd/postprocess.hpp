// Elementwise postprocessing: reconstructs a P_{k+1} approximation from
// the flux, gradient-matched against -eps^{-1} q_h with the element mean
// pinned to that of u_h. The mean constraint is appended as a Lagrange
// multiplier row.

#ifndef HDGCD_POSTPROCESS_HPP
#define HDGCD_POSTPROCESS_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hdgcd/trace_system.hpp"

namespace hdgcd {

struct PostprocessedField {
  int degree = 0;  // k+1
  std::vector<Eigen::VectorXd> coeffs;  // per element, orthonormal P_{k+1} basis
};

inline PostprocessedField postprocess(const HdgSolver& solver, const HdgSolution& sol) {
  const int k = sol.degree;
  const ScalarBasis high(k + 1);
  const int nh = high.dim();
  const TriangleRule rule = triangle_quadrature(2 * (k + 1) + 4);
  const Mesh& mesh = solver.mesh();

  PostprocessedField out;
  out.degree = k + 1;
  out.coeffs.resize(mesh.n_elements());

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    PointList phys(rule.size(), 2);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = geom.p[0] + geom.A * rule.points.row(q).transpose();
      phys(q, 0) = x.x();
      phys(q, 1) = x.y();
    }
    const Eigen::VectorXd w = rule.weights * geom.det;

    const BasisTable ht = high.evaluate(rule.points);
    const Eigen::Matrix2d Bt = geom.Ainv.transpose();
    const Eigen::MatrixXd gx = Bt(0, 0) * ht.dx + Bt(0, 1) * ht.dy;
    const Eigen::MatrixXd gy = Bt(1, 0) * ht.dx + Bt(1, 1) * ht.dy;

    // flux values (the stored unknown is already eps^{-1} q)
    const ElementBasis basis(solver.scalar_basis(), sol.space, geom);
    const ElementBasisValues bv = basis.evaluate(rule.points, phys);
    const Eigen::VectorXd qtx = bv.v_x.transpose() * sol.q_scaled[e];
    const Eigen::VectorXd qty = bv.v_y.transpose() * sol.q_scaled[e];
    const Eigen::VectorXd uh = bv.w_value.transpose() * sol.u[e];

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nh + 1, nh + 1);
    K.topLeftCorner(nh, nh) =
        gx * w.asDiagonal() * gx.transpose() + gy * w.asDiagonal() * gy.transpose();
    const Eigen::VectorXd ones = ht.value * w;
    K.topRightCorner(nh, 1) = ones;
    K.bottomLeftCorner(1, nh) = ones.transpose();

    Eigen::VectorXd rhs(nh + 1);
    rhs.head(nh) = -(gx * w.cwiseProduct(qtx) + gy * w.cwiseProduct(qty));
    rhs(nh) = w.dot(uh);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    if (!(lu.matrixLU().diagonal().cwiseAbs().minCoeff() > 1e-14 * K.cwiseAbs().maxCoeff()))
      throw std::runtime_error("postprocess: singular local system on element " +
                               std::to_string(e));
    out.coeffs[e] = lu.solve(rhs).head(nh);
  }
  return out;
}

/// Values of the postprocessed field on element e at reference points.
inline Eigen::VectorXd postprocessed_values(const PostprocessedField& f, int e,
                                            const PointList& ref) {
  const ScalarBasis high(f.degree);
  return high.evaluate(ref).value.transpose() * f.coeffs[e];
}

}  // namespace hdgcd

#endif
