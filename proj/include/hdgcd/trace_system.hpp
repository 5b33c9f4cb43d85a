// Global trace problem: assembly over interior faces with Dirichlet data
// eliminated by substitution, the eps-robust diagonal scaling, the sparse
// solve, and elementwise recovery of the field unknowns.

#ifndef HDGCD_TRACE_SYSTEM_HPP
#define HDGCD_TRACE_SYSTEM_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hdgcd/linalg.hpp"
#include "hdgcd/local_solver.hpp"
#include "hdgcd/mesh.hpp"
#include "hdgcd/problem.hpp"
#include "hdgcd/sampling.hpp"
#include "hdgcd/stabilization.hpp"

namespace hdgcd {

struct TraceSystem {
  linalg::SparseRowMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<int> face_dof;  // face id -> first dof index, -1 for Dirichlet faces
  int nmu = 0;
  std::vector<Eigen::VectorXd> fixed;  // Dirichlet coefficients per face (empty otherwise)
  Eigen::VectorXd face_scale;          // per-face robust scaling factor Lambda_eps
  bool scaled = false;

  int n_dofs() const { return static_cast<int>(rhs.size()); }

  Eigen::VectorXd dof_scale() const {
    Eigen::VectorXd d(n_dofs());
    for (int fi = 0; fi < static_cast<int>(face_dof.size()); ++fi)
      if (face_dof[fi] >= 0) d.segment(face_dof[fi], nmu).setConstant(face_scale(fi));
    return d;
  }
};

/// Scaling factor per face, (sup_F |beta.n| + min(eps/h_F, 1))^{1/2}.
inline double face_scaling_factor(const Mesh& mesh, int fi, const VelocityField& beta,
                                  double eps) {
  const Face& f = mesh.faces[fi];
  const FaceExtrema ex = beta_normal_extrema(mesh, fi, beta, f.normal);
  const double sup_abs = std::max(std::abs(ex.sup), std::abs(ex.inf));
  const double val = sup_abs + std::min(eps / f.length, 1.0);
  if (!(val > 0.0)) throw std::runtime_error("face_scaling_factor: vanishing scaling");
  return std::sqrt(val);
}

/// Returns the diagonally scaled system (matrix -> D^{-1} A D^{-1},
/// rhs -> D^{-1} b); Unscaled mode returns the input unchanged.
inline TraceSystem apply_scaling(const TraceSystem& sys, ScalingMode mode) {
  if (mode == ScalingMode::Unscaled) return sys;
  TraceSystem out = sys;
  const Eigen::VectorXd d = sys.dof_scale();
  const Eigen::VectorXd dinv = d.cwiseInverse();
  out.matrix = dinv.asDiagonal() * sys.matrix * dinv.asDiagonal();
  out.rhs = dinv.cwiseProduct(sys.rhs);
  out.scaled = true;
  return out;
}

struct HdgSolution {
  int degree = 0;
  VectorSpace space = VectorSpace::Plain;
  double epsilon = 1.0;
  std::vector<Eigen::VectorXd> q_scaled;  // per element, coefficients of eps^{-1} q
  std::vector<Eigen::VectorXd> u;         // per element
  std::vector<Eigen::VectorXd> uhat;      // per face (Dirichlet faces carry projected data)
};

/// Driver owning the discretization caches: bases, quadratures, condensed
/// elements, Dirichlet data and the assembled trace problem.
class HdgSolver {
 public:
  HdgSolver(const Mesh& mesh, const ProblemSpec& prob, const SolverOptions& opts)
      : mesh_(mesh), prob_(prob), opts_(opts), scalar_basis_(opts.degree),
        vol_rule_(triangle_quadrature(opts.volume_quadrature_degree())) {
    const TauReport tau_ok = validate_tau(mesh_, opts_.tau, prob_.beta, prob_.epsilon);
    if (!tau_ok.pass)
      throw std::runtime_error("HdgSolver: stabilization fails the well-posedness check (" +
                               std::to_string(tau_ok.violations.size()) + " violations)");
    build();
  }

  const Mesh& mesh() const { return mesh_; }
  const ProblemSpec& problem() const { return prob_; }
  const SolverOptions& options() const { return opts_; }
  const ScalarBasis& scalar_basis() const { return scalar_basis_; }
  const std::vector<CondensedElement>& condensed() const { return condensed_; }
  const TraceSystem& trace_system() const { return system_; }
  const FaceQuadrature& face_quadrature(int fi) const { return face_quads_[fi]; }
  double tau_value(int e, int lf) const { return condensed_[e].tau[lf]; }

  /// Solves the trace problem (in the requested scaling) and recovers the
  /// element fields.
  HdgSolution solve() const {
    const TraceSystem work = apply_scaling(system_, opts_.scaling);
    Eigen::VectorXd lambda;
    try {
      lambda = linalg::lu_solve(work.matrix, work.rhs);
    } catch (const std::runtime_error& err) {
      const linalg::ConditionEstimate cond = linalg::cond2(work.matrix);
      throw std::runtime_error(std::string("HdgSolver: trace solve failed (") + err.what() +
                               "), condition estimate " + std::to_string(cond.kappa));
    }
    if (opts_.scaling == ScalingMode::EpsilonRobust)
      lambda = work.dof_scale().cwiseInverse().cwiseProduct(lambda);
    return recover(lambda);
  }

  /// Element recovery for a given interior-trace vector (unscaled variables).
  HdgSolution recover(const Eigen::VectorXd& lambda) const {
    HdgSolution sol;
    sol.degree = opts_.degree;
    sol.space = opts_.space;
    sol.epsilon = prob_.epsilon;
    const int nmu = opts_.degree + 1;
    sol.uhat.resize(mesh_.n_faces());
    for (int fi = 0; fi < mesh_.n_faces(); ++fi) {
      if (system_.face_dof[fi] >= 0)
        sol.uhat[fi] = lambda.segment(system_.face_dof[fi], nmu);
      else
        sol.uhat[fi] = system_.fixed[fi];
    }
    sol.q_scaled.resize(mesh_.n_elements());
    sol.u.resize(mesh_.n_elements());
    Eigen::VectorXd local(3 * nmu);
    for (int e = 0; e < mesh_.n_elements(); ++e) {
      const CondensedElement& c = condensed_[e];
      for (int lf = 0; lf < 3; ++lf) local.segment(lf * nmu, nmu) = sol.uhat[c.face_id[lf]];
      sol.q_scaled[e] = c.recover_q * local + c.recover_q_load;
      sol.u[e] = c.recover_u * local + c.recover_u_load;
    }
    return sol;
  }

  /// u_h values on element e at reference points.
  Eigen::VectorXd u_values(const HdgSolution& sol, int e, const PointList& ref) const {
    return scalar_basis_.evaluate(ref).value.transpose() * sol.u[e];
  }

  /// q_h values (the physical flux, q = eps * stored unknown) on element e.
  PointList q_values(const HdgSolution& sol, int e, const PointList& ref) const {
    const ElementGeometry geom = element_geometry(mesh_, e);
    PointList phys(ref.rows(), 2);
    for (int i = 0; i < ref.rows(); ++i) {
      const Vec2 x = geom.p[0] + geom.A * ref.row(i).transpose();
      phys(i, 0) = x.x();
      phys(i, 1) = x.y();
    }
    const ElementBasis basis(scalar_basis_, opts_.space, geom);
    const ElementBasisValues bv = basis.evaluate(ref, phys);
    PointList out(ref.rows(), 2);
    out.col(0) = prob_.epsilon * bv.v_x.transpose() * sol.q_scaled[e];
    out.col(1) = prob_.epsilon * bv.v_y.transpose() * sol.q_scaled[e];
    return out;
  }

  /// Face-basis moments of the numerical flux of element e on local face lf,
  /// <q_h.n + beta.n uhat + tau (u_h - uhat), psi_j>_F.
  Eigen::VectorXd numerical_flux(const HdgSolution& sol, int e, int lf) const {
    const CondensedElement& c = condensed_[e];
    const int fi = c.face_id[lf];
    const FaceQuadrature& fq = face_quads_[fi];
    const ElementGeometry geom = element_geometry(mesh_, e);
    const ElementBasis basis(scalar_basis_, opts_.space, geom);
    const int nf = static_cast<int>(fq.s.size());
    PointList ref(nf, 2);
    for (int q = 0; q < nf; ++q) {
      const Vec2 r = geom.Ainv * (Vec2(fq.x(q, 0), fq.x(q, 1)) - geom.p[0]);
      ref(q, 0) = r.x();
      ref(q, 1) = r.y();
    }
    const ElementBasisValues bv = basis.evaluate(ref, fq.x);
    const Vec2 n = mesh_.outward_normal(e, lf);
    Eigen::VectorXd flux(nf);
    const Eigen::VectorXd uh = bv.w_value.transpose() * sol.u[e];
    const Eigen::VectorXd qn = prob_.epsilon * ((n.x() * bv.v_x + n.y() * bv.v_y).transpose() *
                                                sol.q_scaled[e]);
    const Eigen::VectorXd uhat = fq.mu.transpose() * sol.uhat[fi];
    for (int q = 0; q < nf; ++q) {
      const double bn = prob_.beta(fq.x(q, 0), fq.x(q, 1)).dot(n);
      flux(q) = qn(q) + bn * uhat(q) + c.tau[lf] * (uh(q) - uhat(q));
    }
    return fq.mu * fq.w.cwiseProduct(flux);
  }

 private:
  void build() {
    const int k = opts_.degree, nmu = k + 1;
    face_quads_.resize(mesh_.n_faces());
    for (int fi = 0; fi < mesh_.n_faces(); ++fi)
      face_quads_[fi] = make_face_quadrature(mesh_, fi, k, opts_.face_quadrature_points());

    // Dirichlet data per constrained face, dof map for the rest
    system_.nmu = nmu;
    system_.face_dof.assign(mesh_.n_faces(), -1);
    system_.fixed.resize(mesh_.n_faces());
    system_.face_scale.resize(mesh_.n_faces());
    int next = 0;
    for (int fi = 0; fi < mesh_.n_faces(); ++fi) {
      const Face& f = mesh_.faces[fi];
      system_.face_scale(fi) = face_scaling_factor(mesh_, fi, prob_.beta, prob_.epsilon);
      if (f.kind == FaceKind::Interior) {
        system_.face_dof[fi] = next;
        next += nmu;
      } else {
        system_.fixed[fi] = project_dirichlet(fi);
      }
    }

    condensed_.reserve(mesh_.n_elements());
    for (int e = 0; e < mesh_.n_elements(); ++e)
      condensed_.push_back(
          condense(assemble_local(mesh_, e, prob_, opts_, scalar_basis_, vol_rule_, face_quads_)));

    // global assembly over interior-face rows, fixed element order
    system_.rhs = Eigen::VectorXd::Zero(next);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(mesh_.n_elements()) * 9 * nmu * nmu);
    for (int e = 0; e < mesh_.n_elements(); ++e) {
      const CondensedElement& c = condensed_[e];
      for (int lf = 0; lf < 3; ++lf) {
        const int row0 = system_.face_dof[c.face_id[lf]];
        if (row0 < 0) continue;
        system_.rhs.segment(row0, nmu) += c.G.segment(lf * nmu, nmu);
        for (int lg = 0; lg < 3; ++lg) {
          const int col0 = system_.face_dof[c.face_id[lg]];
          const auto block = c.S.block(lf * nmu, lg * nmu, nmu, nmu);
          if (col0 >= 0) {
            for (int a = 0; a < nmu; ++a)
              for (int b = 0; b < nmu; ++b)
                trips.emplace_back(row0 + a, col0 + b, block(a, b));
          } else {
            system_.rhs.segment(row0, nmu) -= block * system_.fixed[c.face_id[lg]];
          }
        }
      }
    }
    system_.matrix.resize(next, next);
    system_.matrix.setFromTriplets(trips.begin(), trips.end());
    system_.matrix.makeCompressed();
  }

  Eigen::VectorXd project_dirichlet(int fi) const {
    const Face& f = mesh_.faces[fi];
    const int k = opts_.degree;
    const FaceQuadrature fq = make_face_quadrature(
        mesh_, fi, k, opts_.face_quadrature_points() + opts_.data_point_boost);
    const ScalarField& g =
        (f.kind == FaceKind::Slit && prob_.slit) ? prob_.slit->value : prob_.dirichlet;
    Eigen::VectorXd gv(fq.s.size());
    for (int q = 0; q < fq.s.size(); ++q) gv(q) = g(fq.x(q, 0), fq.x(q, 1));
    return fq.mu * fq.w.cwiseProduct(gv);
  }

  const Mesh& mesh_;
  const ProblemSpec& prob_;
  SolverOptions opts_;
  ScalarBasis scalar_basis_;
  TriangleRule vol_rule_;
  std::vector<FaceQuadrature> face_quads_;
  std::vector<CondensedElement> condensed_;
  TraceSystem system_;
};

/// One-call interface: validate, assemble, solve, recover.
inline HdgSolution solve_hdg(const Mesh& mesh, const ProblemSpec& prob,
                             const SolverOptions& opts) {
  return HdgSolver(mesh, prob, opts).solve();
}

}  // namespace hdgcd

#endif
