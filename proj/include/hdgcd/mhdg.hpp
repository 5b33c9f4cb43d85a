// Independent assembly of the mixed-hybrid upwind form of Egger-Schoberl
// type and its comparison against the enriched-space HDG trace matrix.
// The form is assembled monolithically in (q, u, lambda) and the field
// unknowns are eliminated by a dense Schur complement, so the resulting
// trace matrix shares no code path with the HDG condensation.

#ifndef HDGCD_MHDG_HPP
#define HDGCD_MHDG_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hdgcd/trace_system.hpp"

namespace hdgcd {

struct MhdgEquivalenceReport {
  double max_abs_diff = 0.0;
  double max_abs_entry = 0.0;
  double relative = 0.0;
  bool equivalent = false;
};

/// Dense trace matrix of the upwind mixed-hybrid form on the given space,
/// interior-face unknowns only (homogeneous Dirichlet data).
inline Eigen::MatrixXd assemble_mhdg_trace_matrix(const Mesh& mesh, const ProblemSpec& prob,
                                                  int k, VectorSpace space) {
  if (!prob.beta.is_piecewise_constant)
    throw std::invalid_argument("assemble_mhdg_trace_matrix: beta must be piecewise constant");
  const ScalarBasis sb(k);
  const int nw = sb.dim();
  const int nv = vector_space_dim(k, space);
  const int nmu = k + 1;
  const double eps = prob.epsilon;

  // unknown layout: per element (q, u), then interior-face traces
  std::vector<int> face_dof(mesh.n_faces(), -1);
  int n_lambda = 0;
  for (int fi = 0; fi < mesh.n_faces(); ++fi)
    if (mesh.faces[fi].kind == FaceKind::Interior) {
      face_dof[fi] = n_lambda;
      n_lambda += nmu;
    }
  const int n_field = mesh.n_elements() * (nv + nw);
  const int N = n_field + n_lambda;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);

  const TriangleRule vol = triangle_quadrature(2 * k + 6);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    const ElementBasis basis(sb, space, geom);
    const int q0 = e * (nv + nw);
    const int u0 = q0 + nv;

    PointList phys(vol.size(), 2);
    for (int q = 0; q < vol.size(); ++q) {
      const Vec2 x = geom.p[0] + geom.A * vol.points.row(q).transpose();
      phys(q, 0) = x.x();
      phys(q, 1) = x.y();
    }
    const ElementBasisValues bv = basis.evaluate(vol.points, phys);
    const Eigen::VectorXd w = vol.weights * geom.det;
    Eigen::VectorXd b1(vol.size()), b2(vol.size());
    for (int q = 0; q < vol.size(); ++q) {
      const Vec2 b = prob.beta(phys(q, 0), phys(q, 1));
      b1(q) = b.x();
      b2(q) = b.y();
    }

    // (eps^{-1} q, r) - (u, div r)
    M.block(q0, q0, nv, nv) += (bv.v_x * w.asDiagonal() * bv.v_x.transpose() +
                                bv.v_y * w.asDiagonal() * bv.v_y.transpose()) / eps;
    M.block(q0, u0, nv, nw) += -bv.v_div * w.asDiagonal() * bv.w_value.transpose();
    // -(q + beta u, grad w)
    M.block(u0, q0, nw, nv) += -(bv.w_dx * w.asDiagonal() * bv.v_x.transpose() +
                                 bv.w_dy * w.asDiagonal() * bv.v_y.transpose());
    M.block(u0, u0, nw, nw) +=
        -(bv.w_dx * (w.cwiseProduct(b1)).asDiagonal() * bv.w_value.transpose() +
          bv.w_dy * (w.cwiseProduct(b2)).asDiagonal() * bv.w_value.transpose());

    for (int lf = 0; lf < 3; ++lf) {
      const int fi = mesh.elements[e].face[lf];
      const Face& f = mesh.faces[fi];
      const FaceQuadrature fq = make_face_quadrature(mesh, fi, k, k + 4);
      const Vec2 n = mesh.outward_normal(e, lf);
      const int nf = static_cast<int>(fq.s.size());
      PointList ref(nf, 2);
      for (int q = 0; q < nf; ++q) {
        const Vec2 r = geom.Ainv * (Vec2(fq.x(q, 0), fq.x(q, 1)) - geom.p[0]);
        ref(q, 0) = r.x();
        ref(q, 1) = r.y();
      }
      const ElementBasisValues fb = basis.evaluate(ref, fq.x);
      const Eigen::MatrixXd vn = n.x() * fb.v_x + n.y() * fb.v_y;
      const Vec2 bmid = prob.beta(fq.x(nf / 2, 0), fq.x(nf / 2, 1));
      const double bn = bmid.dot(n);  // constant on the face
      const int l0 = (face_dof[fi] >= 0) ? n_field + face_dof[fi] : -1;
      const bool upwind_uses_u = (bn >= 0.0);

      // <lambda, r.n> in the q-rows (lambda = 0 on the boundary)
      if (l0 >= 0)
        M.block(q0, l0, nv, nmu) += vn * fq.w.asDiagonal() * fq.mu.transpose();

      // <q.n + beta.n {lambda/u}, w> in the u-rows
      M.block(u0, q0, nw, nv) += fb.w_value * fq.w.asDiagonal() * vn.transpose();
      if (upwind_uses_u) {
        M.block(u0, u0, nw, nw) +=
            bn * fb.w_value * fq.w.asDiagonal() * fb.w_value.transpose();
      } else if (l0 >= 0) {
        M.block(u0, l0, nw, nmu) += bn * fb.w_value * fq.w.asDiagonal() * fq.mu.transpose();
      }

      // -<q.n + beta.n {lambda/u}, mu> in the trace rows (interior faces)
      if (l0 >= 0) {
        M.block(l0, q0, nmu, nv) += -fq.mu * fq.w.asDiagonal() * vn.transpose();
        if (upwind_uses_u) {
          M.block(l0, u0, nmu, nw) +=
              -bn * fq.mu * fq.w.asDiagonal() * fb.w_value.transpose();
        } else {
          M.block(l0, l0, nmu, nmu) += -bn * fq.mu * fq.w.asDiagonal() * fq.mu.transpose();
        }
      }
    }
  }

  // Schur complement onto the trace block
  const Eigen::MatrixXd Aqu = M.topLeftCorner(n_field, n_field);
  const Eigen::MatrixXd B = M.topRightCorner(n_field, n_lambda);
  const Eigen::MatrixXd C = M.bottomLeftCorner(n_lambda, n_field);
  const Eigen::MatrixXd D = M.bottomRightCorner(n_lambda, n_lambda);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Aqu);
  return D - C * lu.solve(B);
}

/// Compares the independently assembled upwind trace matrix with the trace
/// matrix of the HDG solver on the same space and stabilization.
inline MhdgEquivalenceReport mhdg_equivalence_check(const Mesh& mesh, const ProblemSpec& prob,
                                                    int k, VectorSpace space,
                                                    double tol = 1e-12) {
  SolverOptions opts;
  opts.degree = k;
  opts.space = space;
  opts.tau = StabilizationSpec::upwind();
  opts.scaling = ScalingMode::Unscaled;
  const HdgSolver solver(mesh, prob, opts);
  const Eigen::MatrixXd hdg = Eigen::MatrixXd(solver.trace_system().matrix);
  const Eigen::MatrixXd mh = assemble_mhdg_trace_matrix(mesh, prob, k, space);
  if (hdg.rows() != mh.rows())
    throw std::runtime_error("mhdg_equivalence_check: dof layout mismatch");
  MhdgEquivalenceReport rep;
  rep.max_abs_diff = (hdg - mh).cwiseAbs().maxCoeff();
  rep.max_abs_entry = mh.cwiseAbs().maxCoeff();
  rep.relative = rep.max_abs_diff / rep.max_abs_entry;
  rep.equivalent = rep.relative <= tol;
  return rep;
}

}  // namespace hdgcd

#endif
