// Error measurement: L2 errors (full domain or a reduced box), the
// method's energy-type triple norm, convergence-order extraction, and the
// post-solve residuals of the scheme's algebraic identities.

#ifndef HDGCD_ERRORS_HPP
#define HDGCD_ERRORS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "hdgcd/postprocess.hpp"
#include "hdgcd/projections.hpp"
#include "hdgcd/trace_system.hpp"

namespace hdgcd {

struct ErrorDomain {
  bool reduced = false;
  double x1 = 0.9, y1 = 0.9;  // box [0,x1] x [0,y1] when reduced

  static ErrorDomain full() { return ErrorDomain{}; }
  static ErrorDomain box(double x1 = 0.9, double y1 = 0.9) { return ErrorDomain{true, x1, y1}; }

  bool contains_element(const Mesh& mesh, int e) const {
    if (!reduced) return true;
    for (int i = 0; i < 3; ++i) {
      const Vec2 p = mesh.vertex(mesh.elements[e].v[i]);
      if (p.x() > x1 + 1e-12 || p.y() > y1 + 1e-12) return false;
    }
    return true;
  }
};

namespace detail {

/// Integrates err2(e, ref, phys, w) over the selected elements.
template <typename F>
double accumulate_l2(const Mesh& mesh, int quad_degree, const ErrorDomain& dom, F&& err2) {
  const TriangleRule rule = triangle_quadrature(quad_degree);
  double total = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    if (!dom.contains_element(mesh, e)) continue;
    const ElementGeometry geom = element_geometry(mesh, e);
    PointList phys(rule.size(), 2);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = geom.p[0] + geom.A * rule.points.row(q).transpose();
      phys(q, 0) = x.x();
      phys(q, 1) = x.y();
    }
    total += err2(e, rule.points, phys, (rule.weights * geom.det).eval());
  }
  return std::sqrt(total);
}

}  // namespace detail

/// || exact - u_h ||_{L2} over the full domain or a reduced box.
inline double l2_error(const HdgSolver& solver, const HdgSolution& sol, const ScalarField& exact,
                       const ErrorDomain& dom = ErrorDomain::full()) {
  const int deg = 2 * (sol.degree + 1) + 4;
  return detail::accumulate_l2(
      solver.mesh(), deg, dom,
      [&](int e, const PointList& ref, const PointList& phys, const Eigen::VectorXd& w) {
        const Eigen::VectorXd uh = solver.u_values(sol, e, ref);
        double s = 0.0;
        for (int q = 0; q < w.size(); ++q) {
          const double d = exact(phys(q, 0), phys(q, 1)) - uh(q);
          s += w(q) * d * d;
        }
        return s;
      });
}

/// || exact - u*_h ||_{L2} for the postprocessed field.
inline double l2_error(const HdgSolver& solver, const PostprocessedField& post,
                       const ScalarField& exact, const ErrorDomain& dom = ErrorDomain::full()) {
  const int deg = 2 * (post.degree + 1) + 4;
  const ScalarBasis high(post.degree);
  return detail::accumulate_l2(
      solver.mesh(), deg, dom,
      [&](int e, const PointList& ref, const PointList& phys, const Eigen::VectorXd& w) {
        const Eigen::VectorXd us = high.evaluate(ref).value.transpose() * post.coeffs[e];
        double s = 0.0;
        for (int q = 0; q < w.size(); ++q) {
          const double d = exact(phys(q, 0), phys(q, 1)) - us(q);
          s += w(q) * d * d;
        }
        return s;
      });
}

/// || exact_q - q_h ||_{L2} for the flux.
inline double l2_error_flux(const HdgSolver& solver, const HdgSolution& sol,
                            const VectorField& exact_q,
                            const ErrorDomain& dom = ErrorDomain::full()) {
  const int deg = 2 * (sol.degree + 1) + 4;
  return detail::accumulate_l2(
      solver.mesh(), deg, dom,
      [&](int e, const PointList& ref, const PointList& phys, const Eigen::VectorXd& w) {
        const PointList qh = solver.q_values(sol, e, ref);
        double s = 0.0;
        for (int q = 0; q < w.size(); ++q) {
          const Vec2 d = exact_q(phys(q, 0), phys(q, 1)) - Vec2(qh(q, 0), qh(q, 1));
          s += w(q) * d.squaredNorm();
        }
        return s;
      });
}

/// Callable view of a triple (r, w, mu): element fields sampled at physical
/// points, the trace sampled per (face, parameter).
struct TripleFields {
  std::function<Vec2(int e, double x, double y)> r;
  std::function<double(int e, double x, double y)> w;
  std::function<double(int f, double s, double x, double y)> mu;
};

/// The energy-type norm: (||eps^{-1/2} r||^2 + ||w||^2
///   + || |tau - beta.n/2|^{1/2} (w - mu) ||^2_{dTh})^{1/2}.
inline double triple_norm(const HdgSolver& solver, const TripleFields& fields) {
  const Mesh& mesh = solver.mesh();
  const ProblemSpec& prob = solver.problem();
  const int k = solver.options().degree;
  double total = 0.0;
  const TriangleRule rule = triangle_quadrature(2 * (k + 1) + 4);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = geom.p[0] + geom.A * rule.points.row(q).transpose();
      const double w = rule.weights(q) * geom.det;
      const Vec2 rv = fields.r(e, x.x(), x.y());
      const double wv = fields.w(e, x.x(), x.y());
      total += w * (rv.squaredNorm() / prob.epsilon + wv * wv);
    }
    for (int lf = 0; lf < 3; ++lf) {
      const int fi = mesh.elements[e].face[lf];
      const FaceQuadrature& fq = solver.face_quadrature(fi);
      const Vec2 n = mesh.outward_normal(e, lf);
      const double tau = solver.tau_value(e, lf);
      for (int q = 0; q < fq.s.size(); ++q) {
        const double bn = prob.beta(fq.x(q, 0), fq.x(q, 1)).dot(n);
        const double jump = fields.w(e, fq.x(q, 0), fq.x(q, 1)) -
                            fields.mu(fi, fq.s(q), fq.x(q, 0), fq.x(q, 1));
        total += fq.w(q) * std::abs(tau - 0.5 * bn) * jump * jump;
      }
    }
  }
  return std::sqrt(total);
}

/// Triple norm of the discrete error against a known exact solution.
inline double triple_norm_error(const HdgSolver& solver, const HdgSolution& sol) {
  const ProblemSpec& prob = solver.problem();
  if (!prob.exact) throw std::invalid_argument("triple_norm_error: no exact solution");
  const ScalarBasis& sb = solver.scalar_basis();
  TripleFields f;
  f.r = [&](int e, double x, double y) {
    const ElementGeometry geom = element_geometry(solver.mesh(), e);
    PointList ref(1, 2);
    const Vec2 r = geom.Ainv * (Vec2(x, y) - geom.p[0]);
    ref(0, 0) = r.x();
    ref(0, 1) = r.y();
    const PointList qh = solver.q_values(sol, e, ref);
    return (prob.exact->flux(x, y, prob.epsilon) - Vec2(qh(0, 0), qh(0, 1))).eval();
  };
  f.w = [&](int e, double x, double y) {
    const ElementGeometry geom = element_geometry(solver.mesh(), e);
    PointList ref(1, 2);
    const Vec2 r = geom.Ainv * (Vec2(x, y) - geom.p[0]);
    ref(0, 0) = r.x();
    ref(0, 1) = r.y();
    return prob.exact->u(x, y) - solver.u_values(sol, e, ref)(0);
  };
  f.mu = [&](int fi, double s, double x, double y) {
    const Face& face = solver.mesh().faces[fi];
    Eigen::VectorXd sv(1);
    sv(0) = s;
    const Eigen::MatrixXd mu = FaceBasis(sol.degree, face.length).evaluate(sv);
    return prob.exact->u(x, y) - (mu.transpose() * sol.uhat[fi])(0);
  };
  return triple_norm(solver, f);
}

/// order_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i); NaN marks undefined
/// entries (first level, zero errors).
inline std::vector<double> convergence_orders(const std::vector<double>& errors,
                                              const std::vector<double>& h) {
  std::vector<double> orders(errors.size(), std::numeric_limits<double>::quiet_NaN());
  for (size_t i = 1; i < errors.size(); ++i) {
    if (errors[i - 1] > 0.0 && errors[i] > 0.0 && h[i - 1] != h[i])
      orders[i] = std::log(errors[i - 1] / errors[i]) / std::log(h[i - 1] / h[i]);
  }
  return orders;
}

struct IdentityResiduals {
  double energy = 0.0;        // relative; meaningful for g = 0
  double conservation = 0.0;  // relative max face moment of the flux jump
  double boundary = 0.0;      // max moment of uhat - P_M g on Dirichlet faces
};

inline IdentityResiduals identity_residuals(const HdgSolver& solver, const HdgSolution& sol) {
  const Mesh& mesh = solver.mesh();
  const ProblemSpec& prob = solver.problem();
  const int k = sol.degree, nmu = k + 1;
  IdentityResiduals res;

  // energy identity: (eps^{-1}q,q) + <(tau - beta.n/2)(u-uhat),(u-uhat)>
  //                  - ((div beta)u,u)/2 = (f,u)
  const TriangleRule& vol = triangle_quadrature(solver.options().volume_quadrature_degree());
  double t_q = 0.0, t_face = 0.0, t_div = 0.0, t_rhs = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    const ElementBasis basis(solver.scalar_basis(), sol.space, geom);
    PointList phys(vol.size(), 2);
    for (int q = 0; q < vol.size(); ++q) {
      const Vec2 x = geom.p[0] + geom.A * vol.points.row(q).transpose();
      phys(q, 0) = x.x();
      phys(q, 1) = x.y();
    }
    const ElementBasisValues bv = basis.evaluate(vol.points, phys);
    const Eigen::VectorXd qtx = bv.v_x.transpose() * sol.q_scaled[e];
    const Eigen::VectorXd qty = bv.v_y.transpose() * sol.q_scaled[e];
    const Eigen::VectorXd uh = bv.w_value.transpose() * sol.u[e];
    for (int q = 0; q < vol.size(); ++q) {
      const double w = vol.weights(q) * geom.det;
      t_q += w * prob.epsilon * (qtx(q) * qtx(q) + qty(q) * qty(q));
      t_div -= 0.5 * w * prob.beta.divergence(phys(q, 0), phys(q, 1)) * uh(q) * uh(q);
      t_rhs += w * prob.source(phys(q, 0), phys(q, 1)) * uh(q);
    }
    for (int lf = 0; lf < 3; ++lf) {
      const int fi = mesh.elements[e].face[lf];
      const FaceQuadrature& fq = solver.face_quadrature(fi);
      const Vec2 n = mesh.outward_normal(e, lf);
      const double tau = solver.tau_value(e, lf);
      PointList ref(fq.s.size(), 2);
      for (int q = 0; q < fq.s.size(); ++q) {
        const Vec2 r = geom.Ainv * (Vec2(fq.x(q, 0), fq.x(q, 1)) - geom.p[0]);
        ref(q, 0) = r.x();
        ref(q, 1) = r.y();
      }
      const Eigen::VectorXd uf = solver.scalar_basis().evaluate(ref).value.transpose() * sol.u[e];
      const Eigen::VectorXd uhat = fq.mu.transpose() * sol.uhat[fi];
      for (int q = 0; q < fq.s.size(); ++q) {
        const double bn = prob.beta(fq.x(q, 0), fq.x(q, 1)).dot(n);
        const double jump = uf(q) - uhat(q);
        t_face += fq.w(q) * (tau - 0.5 * bn) * jump * jump;
      }
    }
  }
  const double scale =
      std::abs(t_q) + std::abs(t_face) + std::abs(t_div) + std::abs(t_rhs) + 1e-300;
  res.energy = std::abs(t_q + t_face + t_div - t_rhs) / scale;

  // transmission: moments of the flux jump on interior faces
  double worst = 0.0, norm = 0.0;
  for (int fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.faces[fi];
    if (f.kind != FaceKind::Interior) continue;
    int lf_left = -1, lf_right = -1;
    for (int lf = 0; lf < 3; ++lf) {
      if (mesh.elements[f.left].face[lf] == fi) lf_left = lf;
      if (mesh.elements[f.right].face[lf] == fi) lf_right = lf;
    }
    const Eigen::VectorXd a = solver.numerical_flux(sol, f.left, lf_left);
    const Eigen::VectorXd b = solver.numerical_flux(sol, f.right, lf_right);
    worst = std::max(worst, (a + b).cwiseAbs().maxCoeff());
    norm = std::max({norm, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  }
  res.conservation = worst / (norm + 1e-300);

  // boundary condition: uhat must equal the face projection of the data
  double bworst = 0.0;
  for (int fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.faces[fi];
    if (f.kind == FaceKind::Interior) continue;
    const ScalarField& g = (f.kind == FaceKind::Slit && prob.slit) ? prob.slit->value
                                                                   : prob.dirichlet;
    const Eigen::VectorXd pg = project_face(
        mesh, fi, g, k, solver.options().face_quadrature_points() + solver.options().data_point_boost);
    bworst = std::max(
        bworst, (sol.uhat[fi] - pg).cwiseAbs().maxCoeff() / (1.0 + pg.cwiseAbs().maxCoeff()));
  }
  res.boundary = bworst;
  return res;
}

}  // namespace hdgcd

#endif
