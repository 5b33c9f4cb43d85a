// Estimation of face extrema of beta.n by sampling: 5 interior Gauss
// points plus the two endpoints of the face.

#ifndef HDGCD_SAMPLING_HPP
#define HDGCD_SAMPLING_HPP

#include <algorithm>

#include "hdgcd/mesh.hpp"
#include "hdgcd/problem.hpp"
#include "hdgcd/quadrature.hpp"

namespace hdgcd {

inline const Eigen::VectorXd& face_sample_parameters() {
  static const Eigen::VectorXd s = [] {
    const EdgeRule g = edge_gauss(5);
    Eigen::VectorXd out(7);
    out(0) = 0.0;
    out.segment(1, 5) = g.points;
    out(6) = 1.0;
    return out;
  }();
  return s;
}

struct FaceExtrema {
  double sup = 0.0;  // max over samples of beta.n
  double inf = 0.0;  // min over samples of beta.n
};

/// Extrema of beta.n over face `fi` with respect to the given unit normal.
inline FaceExtrema beta_normal_extrema(const Mesh& mesh, int fi, const VelocityField& beta,
                                       const Vec2& normal) {
  const Face& f = mesh.faces[fi];
  const Vec2 a = mesh.vertex(f.v[0]), b = mesh.vertex(f.v[1]);
  const Eigen::VectorXd& s = face_sample_parameters();
  FaceExtrema ex;
  ex.sup = -std::numeric_limits<double>::infinity();
  ex.inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.size(); ++i) {
    const Vec2 p = a + s(i) * (b - a);
    const double bn = beta(p.x(), p.y()).dot(normal);
    ex.sup = std::max(ex.sup, bn);
    ex.inf = std::min(ex.inf, bn);
  }
  return ex;
}

/// Extrema with respect to the outward normal of element e on local face lf.
inline FaceExtrema beta_normal_extrema(const Mesh& mesh, int e, int lf,
                                       const VelocityField& beta) {
  const int fi = mesh.elements[e].face[lf];
  return beta_normal_extrema(mesh, fi, beta, mesh.outward_normal(e, lf));
}

}  // namespace hdgcd

#endif
