// Element-local HDG machinery: local solves in (q, u) driven by the trace
// and the source, and their static condensation to per-element trace
// blocks. The flux unknown is carried internally as eps^{-1} q, which
// keeps the local blocks O(1) uniformly in eps.

#ifndef HDGCD_LOCAL_SOLVER_HPP
#define HDGCD_LOCAL_SOLVER_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdgcd/basis.hpp"
#include "hdgcd/mesh.hpp"
#include "hdgcd/problem.hpp"
#include "hdgcd/quadrature.hpp"
#include "hdgcd/stabilization.hpp"

namespace hdgcd {

enum class VectorSpace { Plain, RtEnriched };

inline int vector_space_dim(int k, VectorSpace s) {
  return (s == VectorSpace::Plain) ? (k + 1) * (k + 2) : (k + 1) * (k + 3);
}

enum class ScalingMode { Unscaled, EpsilonRobust };

struct SolverOptions {
  int degree = 1;
  VectorSpace space = VectorSpace::Plain;
  StabilizationSpec tau = StabilizationSpec::upwind();
  ScalingMode scaling = ScalingMode::EpsilonRobust;
  int volume_quad_boost = 0;  // added to the default degree 2k+4
  int face_point_boost = 0;   // added to the default k+3 Gauss points
  int data_point_boost = 3;   // extra face points for projecting boundary data

  int volume_quadrature_degree() const { return 2 * degree + 4 + volume_quad_boost; }
  int face_quadrature_points() const { return degree + 3 + face_point_boost; }

  static SolverOptions hdg1(int k) { return SolverOptions{k, VectorSpace::Plain, StabilizationSpec::upwind()}; }
  static SolverOptions hdg2(int k, double rho0 = 0.1) {
    return SolverOptions{k, VectorSpace::Plain, StabilizationSpec::upwind_diffusion(rho0)};
  }
  static SolverOptions hdg3(int k) {
    return SolverOptions{k, VectorSpace::RtEnriched, StabilizationSpec::upwind()};
  }
};

struct ElementGeometry {
  std::array<Vec2, 3> p;
  Eigen::Matrix2d A;     // x = p[0] + A * xref
  Eigen::Matrix2d Ainv;
  double det = 0.0;
  double area = 0.0;
  double h = 0.0;
  Vec2 centroid;
};

inline ElementGeometry element_geometry(const Mesh& mesh, int e) {
  ElementGeometry g;
  const Element& K = mesh.elements[e];
  for (int i = 0; i < 3; ++i) g.p[i] = mesh.vertex(K.v[i]);
  g.A.col(0) = g.p[1] - g.p[0];
  g.A.col(1) = g.p[2] - g.p[0];
  g.det = g.A.determinant();
  g.Ainv = g.A.inverse();
  g.area = 0.5 * g.det;
  g.h = std::sqrt(g.area);
  g.centroid = (g.p[0] + g.p[1] + g.p[2]) / 3.0;
  return g;
}

/// Values, physical gradients and (for the vector space) divergences of the
/// element bases at a batch of physical points.
struct ElementBasisValues {
  Eigen::MatrixXd w_value;  // nw x np scalar values
  Eigen::MatrixXd w_dx, w_dy;
  Eigen::MatrixXd v_x, v_y;  // nv x np vector components
  Eigen::MatrixXd v_div;     // nv x np
};

/// Evaluates the scalar P_k basis and the chosen vector basis on one
/// element. The RT-type enrichment is built in physical coordinates as
/// ((x - x_K)/h_K) times the top-degree scalar functions.
class ElementBasis {
 public:
  ElementBasis(const ScalarBasis& sb, VectorSpace space, const ElementGeometry& geom)
      : sb_(sb), space_(space), geom_(geom) {}

  int scalar_dim() const { return sb_.dim(); }
  int vector_dim() const { return vector_space_dim(sb_.degree(), space_); }

  ElementBasisValues evaluate(const PointList& ref, const PointList& phys) const {
    const int np = static_cast<int>(ref.rows());
    const int nw = scalar_dim();
    const int nv = vector_dim();
    const BasisTable t = sb_.evaluate(ref);
    ElementBasisValues out;
    out.w_value = t.value;
    // physical gradients: grad = Ainv^T * ref_grad
    const Eigen::Matrix2d Bt = geom_.Ainv.transpose();
    out.w_dx = Bt(0, 0) * t.dx + Bt(0, 1) * t.dy;
    out.w_dy = Bt(1, 0) * t.dx + Bt(1, 1) * t.dy;
    out.v_x = Eigen::MatrixXd::Zero(nv, np);
    out.v_y = Eigen::MatrixXd::Zero(nv, np);
    out.v_div = Eigen::MatrixXd::Zero(nv, np);
    out.v_x.topRows(nw) = out.w_value;
    out.v_y.middleRows(nw, nw) = out.w_value;
    out.v_div.topRows(nw) = out.w_dx;
    out.v_div.middleRows(nw, nw) = out.w_dy;
    if (space_ == VectorSpace::RtEnriched) {
      const int k = sb_.degree();
      const int first_top = scalar_space_dim(k - 1);
      const double inv_h = 1.0 / geom_.h;
      for (int j = 0; j <= k; ++j) {
        const int src = first_top + j;
        const int row = 2 * nw + j;
        for (int q = 0; q < np; ++q) {
          const double dx = (phys(q, 0) - geom_.centroid.x()) * inv_h;
          const double dy = (phys(q, 1) - geom_.centroid.y()) * inv_h;
          out.v_x(row, q) = out.w_value(src, q) * dx;
          out.v_y(row, q) = out.w_value(src, q) * dy;
          out.v_div(row, q) =
              out.w_dx(src, q) * dx + out.w_dy(src, q) * dy + 2.0 * inv_h * out.w_value(src, q);
        }
      }
    }
    return out;
  }

 private:
  const ScalarBasis& sb_;
  VectorSpace space_;
  const ElementGeometry& geom_;
};

/// Quadrature along one global face: physical points shared bitwise by the
/// two adjacent elements, and the orthonormal face basis at those points.
struct FaceQuadrature {
  Eigen::VectorXd s;   // parameters in [0,1] from face.v[0] to face.v[1]
  Eigen::VectorXd w;   // weights, sum = |F|
  PointList x;         // physical points
  Eigen::MatrixXd mu;  // face basis values, (k+1) x nq
};

inline FaceQuadrature make_face_quadrature(const Mesh& mesh, int fi, int k, int npoints) {
  const Face& f = mesh.faces[fi];
  const EdgeRule rule = edge_gauss(npoints);
  FaceQuadrature q;
  q.s = rule.points;
  q.w = rule.weights * f.length;
  const Vec2 a = mesh.vertex(f.v[0]), b = mesh.vertex(f.v[1]);
  q.x.resize(rule.size(), 2);
  for (int i = 0; i < rule.size(); ++i) {
    const Vec2 p = a + q.s(i) * (b - a);
    q.x(i, 0) = p.x();
    q.x(i, 1) = p.y();
  }
  q.mu = FaceBasis(k, f.length).evaluate(q.s);
  return q;
}

/// The element system in the unknowns (eps^{-1} q, u) and the couplings to
/// the face trace and the source, plus the trace extraction blocks used by
/// the condensation.
struct LocalMatrices {
  int element = -1;
  int nv = 0, nw = 0, nmu = 0;
  Eigen::MatrixXd mass_q;       // (eps^{-1} q, r) in the scaled unknown
  Eigen::MatrixXd q_from_u;     // -(u, div r)
  Eigen::MatrixXd u_from_q;     // (div q, w) = eps (div qt, w)
  Eigen::MatrixXd u_from_u;     // -(u, div(beta w)) + <tau u, w>
  Eigen::MatrixXd q_from_trace; // -<lambda, r.n>
  Eigen::MatrixXd u_from_trace; // <(tau - beta.n) lambda, w>
  Eigen::VectorXd load;         // (f, w)
  Eigen::MatrixXd trace_q;      // <q.n, mu> = eps <qt.n, mu>
  Eigen::MatrixXd trace_u;      // <u, mu>
  std::array<double, 3> tau{0.0, 0.0, 0.0};
  std::array<int, 3> face_id{-1, -1, -1};
};

/// Per-element Schur complement: the local contribution S, G to the global
/// trace problem and the maps recovering (eps^{-1} q, u) from (trace, f).
struct CondensedElement {
  int element = -1;
  int nmu = 0;
  Eigen::MatrixXd S;          // 3(k+1) x 3(k+1)
  Eigen::VectorXd G;          // 3(k+1)
  Eigen::MatrixXd recover_q;  // nv x 3(k+1), maps trace coeffs to eps^{-1} q
  Eigen::MatrixXd recover_u;  // nw x 3(k+1)
  Eigen::VectorXd recover_q_load;  // source contribution
  Eigen::VectorXd recover_u_load;
  std::array<double, 3> tau{0.0, 0.0, 0.0};
  std::array<int, 3> face_id{-1, -1, -1};
};

/// Assembles the local element system by mapped-reference quadrature.
inline LocalMatrices assemble_local(const Mesh& mesh, int e, const ProblemSpec& prob,
                                    const SolverOptions& opts, const ScalarBasis& sb,
                                    const TriangleRule& vol_rule,
                                    const std::vector<FaceQuadrature>& face_quads) {
  const ElementGeometry geom = element_geometry(mesh, e);
  if (!(geom.det > 0.0))
    throw std::runtime_error("assemble_local: singular element geometry, element " +
                             std::to_string(e));
  const ElementBasis basis(sb, opts.space, geom);
  const int nw = basis.scalar_dim(), nv = basis.vector_dim(), nmu = opts.degree + 1;
  const double eps = prob.epsilon;

  LocalMatrices L;
  L.element = e;
  L.nv = nv;
  L.nw = nw;
  L.nmu = nmu;

  // volume part
  const int nq = vol_rule.size();
  PointList phys(nq, 2);
  for (int q = 0; q < nq; ++q) {
    const Vec2 x = geom.p[0] + geom.A * vol_rule.points.row(q).transpose();
    phys(q, 0) = x.x();
    phys(q, 1) = x.y();
  }
  const Eigen::VectorXd wq = vol_rule.weights * geom.det;
  const ElementBasisValues bv = basis.evaluate(vol_rule.points, phys);

  Eigen::VectorXd b1(nq), b2(nq), db(nq), fv(nq);
  for (int q = 0; q < nq; ++q) {
    const Vec2 b = prob.beta(phys(q, 0), phys(q, 1));
    b1(q) = b.x();
    b2(q) = b.y();
    db(q) = prob.beta.divergence(phys(q, 0), phys(q, 1));
    fv(q) = prob.source(phys(q, 0), phys(q, 1));
  }

  L.mass_q = bv.v_x * wq.asDiagonal() * bv.v_x.transpose() +
             bv.v_y * wq.asDiagonal() * bv.v_y.transpose();
  L.q_from_u = -bv.v_div * wq.asDiagonal() * bv.w_value.transpose();
  L.u_from_q = eps * bv.w_value * wq.asDiagonal() * bv.v_div.transpose();
  // -(u, div(beta w)) = -(u, (div beta) w + beta . grad w)
  Eigen::MatrixXd conv = bv.w_dx * (wq.cwiseProduct(b1)).asDiagonal() * bv.w_value.transpose() +
                         bv.w_dy * (wq.cwiseProduct(b2)).asDiagonal() * bv.w_value.transpose() +
                         bv.w_value * (wq.cwiseProduct(db)).asDiagonal() * bv.w_value.transpose();
  L.u_from_u = -conv;
  L.load = bv.w_value * wq.cwiseProduct(fv);

  L.q_from_trace = Eigen::MatrixXd::Zero(nv, 3 * nmu);
  L.u_from_trace = Eigen::MatrixXd::Zero(nw, 3 * nmu);
  L.trace_q = Eigen::MatrixXd::Zero(3 * nmu, nv);
  L.trace_u = Eigen::MatrixXd::Zero(3 * nmu, nw);

  for (int lf = 0; lf < 3; ++lf) {
    const int fi = mesh.elements[e].face[lf];
    L.face_id[lf] = fi;
    L.tau[lf] = tau_eval(opts.tau, mesh, e, lf, prob.beta, eps);
    const FaceQuadrature& fq = face_quads[fi];
    const int nf = static_cast<int>(fq.s.size());
    const Vec2 n = mesh.outward_normal(e, lf);

    PointList ref(nf, 2);
    for (int q = 0; q < nf; ++q) {
      const Vec2 r = geom.Ainv * (Vec2(fq.x(q, 0), fq.x(q, 1)) - geom.p[0]);
      ref(q, 0) = r.x();
      ref(q, 1) = r.y();
    }
    const ElementBasisValues fb = basis.evaluate(ref, fq.x);
    Eigen::MatrixXd vn = n.x() * fb.v_x + n.y() * fb.v_y;  // nv x nf
    Eigen::VectorXd bn(nf);
    for (int q = 0; q < nf; ++q) bn(q) = prob.beta(fq.x(q, 0), fq.x(q, 1)).dot(n);

    const auto rows = Eigen::seqN(lf * nmu, nmu);
    L.trace_q(rows, Eigen::all) = eps * fq.mu * fq.w.asDiagonal() * vn.transpose();
    L.trace_u(rows, Eigen::all) = fq.mu * fq.w.asDiagonal() * fb.w_value.transpose();
    L.q_from_trace(Eigen::all, rows) = -vn * fq.w.asDiagonal() * fq.mu.transpose();
    L.u_from_trace(Eigen::all, rows) =
        fb.w_value * (fq.w.array() * (L.tau[lf] - bn.array())).matrix().asDiagonal() *
        fq.mu.transpose();
    L.u_from_u += L.tau[lf] * fb.w_value * fq.w.asDiagonal() * fb.w_value.transpose();
  }
  return L;
}

/// Eliminates (q, u) from the local system; the resulting S and G realize
/// the trace bilinear form and load restricted to the element.
inline CondensedElement condense(const LocalMatrices& L) {
  const int nv = L.nv, nw = L.nw, nm = 3 * L.nmu;
  Eigen::MatrixXd K(nv + nw, nv + nw);
  K.topLeftCorner(nv, nv) = L.mass_q;
  K.topRightCorner(nv, nw) = L.q_from_u;
  K.bottomLeftCorner(nw, nv) = L.u_from_q;
  K.bottomRightCorner(nw, nw) = L.u_from_u;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  const double scale = K.cwiseAbs().maxCoeff();
  if (!(pivot_min > 1e-14 * scale))
    throw std::runtime_error("condense: singular local block on element " +
                             std::to_string(L.element) + " (pivot ratio " +
                             std::to_string(pivot_min / scale) + ")");

  Eigen::MatrixXd rhs(nv + nw, nm + 1);
  rhs.topLeftCorner(nv, nm) = L.q_from_trace;
  rhs.bottomLeftCorner(nw, nm) = L.u_from_trace;
  rhs.topRightCorner(nv, 1).setZero();
  rhs.bottomRightCorner(nw, 1) = L.load;
  const Eigen::MatrixXd R = lu.solve(rhs);

  CondensedElement c;
  c.element = L.element;
  c.nmu = L.nmu;
  c.tau = L.tau;
  c.face_id = L.face_id;
  c.recover_q = R.topLeftCorner(nv, nm);
  c.recover_u = R.bottomLeftCorner(nw, nm);
  c.recover_q_load = R.topRightCorner(nv, 1);
  c.recover_u_load = R.bottomRightCorner(nw, 1);

  Eigen::MatrixXd trace_tau_u = L.trace_u;
  for (int lf = 0; lf < 3; ++lf)
    trace_tau_u.middleRows(lf * L.nmu, L.nmu) *= L.tau[lf];

  c.S = -L.trace_q * c.recover_q - trace_tau_u * c.recover_u;
  for (int lf = 0; lf < 3; ++lf)
    c.S.diagonal().segment(lf * L.nmu, L.nmu).array() += L.tau[lf];
  c.G = L.trace_q * c.recover_q_load + trace_tau_u * c.recover_u_load;
  return c;
}

}  // namespace hdgcd

#endif
