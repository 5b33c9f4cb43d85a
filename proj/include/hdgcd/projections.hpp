// The projections used in the analysis, realized by small dense moment
// systems per element/face. They serve as independent oracles in tests:
// the face L2 projection, and the two tailored element projections whose
// moment sets involve a designated face.

#ifndef HDGCD_PROJECTIONS_HPP
#define HDGCD_PROJECTIONS_HPP

#include <stdexcept>

#include <Eigen/Dense>

#include "hdgcd/basis.hpp"
#include "hdgcd/local_solver.hpp"
#include "hdgcd/mesh.hpp"
#include "hdgcd/problem.hpp"
#include "hdgcd/quadrature.hpp"
#include "hdgcd/stabilization.hpp"

namespace hdgcd {

/// L2 projection onto P_k(F): coefficients in the orthonormal face basis.
inline Eigen::VectorXd project_face(const Mesh& mesh, int fi, const ScalarField& u, int k,
                                    int npoints = 0) {
  if (npoints <= 0) npoints = k + 8;
  const FaceQuadrature fq = make_face_quadrature(mesh, fi, k, npoints);
  Eigen::VectorXd uv(fq.s.size());
  for (int q = 0; q < fq.s.size(); ++q) uv(q) = u(fq.x(q, 0), fq.x(q, 1));
  return fq.mu * fq.w.cwiseProduct(uv);
}

/// Faces singled out by the stabilization on an element: `star` carries the
/// maximal tau, `inflow` the maximal inf(tau - beta.n/2). Ties resolve to
/// the lowest local face index.
struct SpecialFaces {
  int star = 0;
  int inflow = 0;
};

inline SpecialFaces select_special_faces(const Mesh& mesh, int e, const StabilizationSpec& tau,
                                         const VelocityField& beta, double eps) {
  SpecialFaces sf;
  double best_tau = -1.0, best_margin = -std::numeric_limits<double>::infinity();
  for (int lf = 0; lf < 3; ++lf) {
    const double t = tau_eval(tau, mesh, e, lf, beta, eps);
    const double margin = t - 0.5 * beta_normal_extrema(mesh, e, lf, beta).sup;
    if (t > best_tau + 1e-14) {
      best_tau = t;
      sf.star = lf;
    }
    if (margin > best_margin + 1e-14) {
      best_margin = margin;
      sf.inflow = lf;
    }
  }
  return sf;
}

/// Element projection of a scalar: interior moments against P_{k-1}(K) and
/// face moments on the designated face. Returns coefficients in the
/// orthonormal P_k basis of the element.
inline Eigen::VectorXd project_element_scalar(const Mesh& mesh, int e, const ScalarField& u,
                                              int k, int star_face, int quad_degree = 0) {
  if (quad_degree <= 0) quad_degree = 2 * k + 8;
  const ScalarBasis sb(k);
  const int nw = sb.dim();
  const int n_interior = scalar_space_dim(k - 1);  // 0 for k = 0
  const ElementGeometry geom = element_geometry(mesh, e);
  const TriangleRule rule = triangle_quadrature(quad_degree);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nw, nw);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nw);
  // interior rows: orthonormal reference basis, so (phi_j, phi_i)_K = det * I
  const BasisTable tab = sb.evaluate(rule.points);
  for (int i = 0; i < n_interior; ++i) M(i, i) = geom.det;
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 x = geom.p[0] + geom.A * rule.points.row(q).transpose();
    const double w = rule.weights(q) * geom.det;
    const double uv = u(x.x(), x.y());
    for (int i = 0; i < n_interior; ++i) rhs(i) += w * uv * tab.value(i, q);
  }
  // face rows on the designated face
  const int fi = mesh.elements[e].face[star_face];
  const FaceQuadrature fq = make_face_quadrature(mesh, fi, k, k + 8);
  PointList ref(fq.s.size(), 2);
  Eigen::VectorXd uf(fq.s.size());
  for (int q = 0; q < fq.s.size(); ++q) {
    const Vec2 r = geom.Ainv * (Vec2(fq.x(q, 0), fq.x(q, 1)) - geom.p[0]);
    ref(q, 0) = r.x();
    ref(q, 1) = r.y();
    uf(q) = u(fq.x(q, 0), fq.x(q, 1));
  }
  const BasisTable ftab = sb.evaluate(ref);
  M.bottomRows(k + 1) = fq.mu * fq.w.asDiagonal() * ftab.value.transpose();
  rhs.tail(k + 1) = fq.mu * fq.w.cwiseProduct(uf);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  if (!(lu.matrixLU().diagonal().cwiseAbs().minCoeff() > 1e-13 * M.cwiseAbs().maxCoeff()))
    throw std::runtime_error("project_element_scalar: singular moment system");
  return lu.solve(rhs);
}

/// Element projection of a vector field: interior moments against
/// P_{k-1}(K)^2 and normal-trace moments on the two faces other than the
/// designated one. Coefficients in the plain (P_k)^2 element basis.
inline Eigen::VectorXd project_element_vector(const Mesh& mesh, int e, const VectorField& qfun,
                                              int k, int skip_face, int quad_degree = 0) {
  if (quad_degree <= 0) quad_degree = 2 * k + 8;
  const ScalarBasis sb(k);
  const int nw = sb.dim();
  const int nv = 2 * nw;
  const int n_interior = 2 * scalar_space_dim(k - 1);
  const ElementGeometry geom = element_geometry(mesh, e);
  const TriangleRule rule = triangle_quadrature(quad_degree);
  const BasisTable tab = sb.evaluate(rule.points);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nv, nv);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv);
  const int nless = scalar_space_dim(k - 1);
  for (int i = 0; i < nless; ++i) {
    M(2 * i, i) = geom.det;            // x-component row against phi_i e1
    M(2 * i + 1, nw + i) = geom.det;   // y-component row
  }
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 x = geom.p[0] + geom.A * rule.points.row(q).transpose();
    const double w = rule.weights(q) * geom.det;
    const Vec2 qv = qfun(x.x(), x.y());
    for (int i = 0; i < nless; ++i) {
      rhs(2 * i) += w * qv.x() * tab.value(i, q);
      rhs(2 * i + 1) += w * qv.y() * tab.value(i, q);
    }
  }
  int row = n_interior;
  for (int lf = 0; lf < 3; ++lf) {
    if (lf == skip_face) continue;
    const int fi = mesh.elements[e].face[lf];
    const Vec2 n = mesh.outward_normal(e, lf);
    const FaceQuadrature fq = make_face_quadrature(mesh, fi, k, k + 8);
    PointList ref(fq.s.size(), 2);
    Eigen::VectorXd qn(fq.s.size());
    for (int q = 0; q < fq.s.size(); ++q) {
      const Vec2 r = geom.Ainv * (Vec2(fq.x(q, 0), fq.x(q, 1)) - geom.p[0]);
      ref(q, 0) = r.x();
      ref(q, 1) = r.y();
      qn(q) = qfun(fq.x(q, 0), fq.x(q, 1)).dot(n);
    }
    const BasisTable ftab = sb.evaluate(ref);
    M.block(row, 0, k + 1, nw) =
        n.x() * (fq.mu * fq.w.asDiagonal() * ftab.value.transpose());
    M.block(row, nw, k + 1, nw) =
        n.y() * (fq.mu * fq.w.asDiagonal() * ftab.value.transpose());
    rhs.segment(row, k + 1) = fq.mu * fq.w.cwiseProduct(qn);
    row += k + 1;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  if (!(lu.matrixLU().diagonal().cwiseAbs().minCoeff() > 1e-13 * M.cwiseAbs().maxCoeff()))
    throw std::runtime_error("project_element_vector: singular moment system");
  return lu.solve(rhs);
}

}  // namespace hdgcd

#endif
