// Streamline-alignment check on a mesh: on each element, every face other
// than the strongest-outflow face must satisfy max(sup_F beta.n, 0) <= C h_K.

#ifndef HDGCD_MESH_CHECK_HPP
#define HDGCD_MESH_CHECK_HPP

#include <vector>

#include "hdgcd/mesh.hpp"
#include "hdgcd/problem.hpp"
#include "hdgcd/sampling.hpp"

namespace hdgcd {

struct MeshAssumptionViolation {
  int element = -1;
  int local_face = -1;
  double value = 0.0;  // the offending max(sup beta.n, 0)
  double limit = 0.0;  // C * h_K
};

struct MeshAssumptionReport {
  bool pass = true;
  std::vector<MeshAssumptionViolation> violations;
};

inline MeshAssumptionReport check_mesh_assumption(const Mesh& mesh, const VelocityField& beta,
                                                  double C) {
  MeshAssumptionReport rep;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    double sup[3];
    int outflow = 0;
    for (int lf = 0; lf < 3; ++lf) {
      sup[lf] = beta_normal_extrema(mesh, e, lf, beta).sup;
      if (sup[lf] > sup[outflow]) outflow = lf;  // ties keep the lowest index
    }
    const double limit = C * mesh.elements[e].h;
    for (int lf = 0; lf < 3; ++lf) {
      if (lf == outflow) continue;
      const double val = std::max(sup[lf], 0.0);
      if (val > limit + 1e-12) {
        rep.pass = false;
        rep.violations.push_back({e, lf, val, limit});
      }
    }
  }
  return rep;
}

}  // namespace hdgcd

#endif
