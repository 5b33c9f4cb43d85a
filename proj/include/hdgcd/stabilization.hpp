// Stabilization functions: the per-(element, face) constant tau and the
// well-posedness validator.

#ifndef HDGCD_STABILIZATION_HPP
#define HDGCD_STABILIZATION_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "hdgcd/mesh.hpp"
#include "hdgcd/problem.hpp"
#include "hdgcd/sampling.hpp"

namespace hdgcd {

/// Length scale entering the diffusive part of the upwind-plus-diffusion rule.
enum class TauLengthScale { FaceLength, ElementSize };

/// Rule producing the stabilization constant tau on each (element, face):
///  - Upwind:            max(sup_F beta.n, 0)
///  - UpwindDiffusion:   upwind + min(rho0 * eps / length, 1)
///  - AbsUpwind:         sup_F |beta.n|  (absolute-value variant)
///  - Constant:          a fixed value
struct StabilizationSpec {
  enum class Kind { Upwind, UpwindDiffusion, AbsUpwind, Constant };

  Kind kind = Kind::Upwind;
  double rho0 = 0.1;
  TauLengthScale length_scale = TauLengthScale::ElementSize;
  double constant_value = 1.0;

  static StabilizationSpec upwind() { return StabilizationSpec{Kind::Upwind, 0.1, TauLengthScale::ElementSize, 0.0}; }
  static StabilizationSpec upwind_diffusion(double rho0,
                                            TauLengthScale ls = TauLengthScale::ElementSize) {
    return StabilizationSpec{Kind::UpwindDiffusion, rho0, ls, 0.0};
  }
  static StabilizationSpec abs_upwind() { return StabilizationSpec{Kind::AbsUpwind, 0.1, TauLengthScale::ElementSize, 0.0}; }
  static StabilizationSpec constant(double c) { return StabilizationSpec{Kind::Constant, 0.1, TauLengthScale::ElementSize, c}; }
};

/// tau on local face lf of element e (outward normal of e).
inline double tau_eval(const StabilizationSpec& spec, const Mesh& mesh, int e, int lf,
                       const VelocityField& beta, double eps) {
  if (spec.kind == StabilizationSpec::Kind::Constant) return spec.constant_value;
  const FaceExtrema ex = beta_normal_extrema(mesh, e, lf, beta);
  if (spec.kind == StabilizationSpec::Kind::AbsUpwind)
    return std::max(std::abs(ex.sup), std::abs(ex.inf));
  double tau = std::max(ex.sup, 0.0);
  if (spec.kind == StabilizationSpec::Kind::UpwindDiffusion) {
    const double len = (spec.length_scale == TauLengthScale::FaceLength)
                           ? mesh.faces[mesh.elements[e].face[lf]].length
                           : mesh.elements[e].h;
    tau += std::min(spec.rho0 * eps / len, 1.0);
  }
  return tau;
}

struct TauViolation {
  int element = -1;
  int local_face = -1;
  double value = 0.0;
  std::string what;
};

/// Well-posedness report: inf_F(tau - beta.n/2) >= 0 on every face, with
/// strict inequality on at least one face of every element.
struct TauReport {
  bool pass = true;
  std::vector<TauViolation> violations;
};

inline TauReport validate_tau(const Mesh& mesh, const StabilizationSpec& spec,
                              const VelocityField& beta, double eps) {
  TauReport rep;
  const double tol = 1e-12;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    bool has_strict = false;
    for (int lf = 0; lf < 3; ++lf) {
      const double tau = tau_eval(spec, mesh, e, lf, beta, eps);
      const FaceExtrema ex = beta_normal_extrema(mesh, e, lf, beta);
      const double margin = tau - 0.5 * ex.sup;  // inf over F of (tau - beta.n/2)
      if (margin < -tol) {
        rep.pass = false;
        rep.violations.push_back({e, lf, margin, "tau - beta.n/2 negative on face"});
      }
      if (margin > tol) has_strict = true;
    }
    if (!has_strict) {
      rep.pass = false;
      rep.violations.push_back({e, -1, 0.0, "no face with strictly positive tau - beta.n/2"});
    }
  }
  return rep;
}

}  // namespace hdgcd

#endif
